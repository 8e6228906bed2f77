#include "qcrypt/report.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace qcrypt::cli {

Record& Record::add(const std::string& key, std::string value) {
    fields_.emplace_back(key, Value(std::move(value)));
    return *this;
}

Record& Record::add(const std::string& key, const char* value) {
    return add(key, std::string(value));
}

Record& Record::add(const std::string& key, double value) {
    fields_.emplace_back(key, Value(value));
    return *this;
}

Record& Record::add(const std::string& key, long value) {
    fields_.emplace_back(key, Value(value));
    return *this;
}

std::vector<std::string> Record::keys() const {
    std::vector<std::string> out;
    out.reserve(fields_.size());
    for (const auto& [k, v] : fields_) out.push_back(k);
    return out;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

namespace {

std::string value_to_string(const Record::Value& v) {
    if (std::holds_alternative<std::string>(v)) return std::get<std::string>(v);
    if (std::holds_alternative<double>(v)) return format_double(std::get<double>(v));
    return std::to_string(std::get<long>(v));
}

std::string csv_escape(const std::string& s) {
    bool needs_quotes = s.find_first_of(",\"\n\r") != std::string::npos;
    if (!needs_quotes) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out;
}

void check_homogeneous(const std::vector<std::string>& header, const Record& record) {
    if (record.keys() != header)
        throw std::invalid_argument("emit_report: record fields do not match the header");
}

}  // namespace

std::string to_csv(const std::vector<std::string>& header, const std::vector<Record>& records) {
    std::ostringstream os;
    for (size_t i = 0; i < header.size(); ++i) {
        if (i) os << ',';
        os << csv_escape(header[i]);
    }
    os << "\r\n";
    for (const Record& record : records) {
        check_homogeneous(header, record);
        const auto& fields = record.fields();
        for (size_t i = 0; i < fields.size(); ++i) {
            if (i) os << ',';
            os << csv_escape(value_to_string(fields[i].second));
        }
        os << "\r\n";
    }
    return os.str();
}

std::string to_json(const std::vector<std::string>& header, const std::vector<Record>& records) {
    std::ostringstream os;
    os << "[";
    for (size_t r = 0; r < records.size(); ++r) {
        check_homogeneous(header, records[r]);
        if (r) os << ",";
        os << "{";
        const auto& fields = records[r].fields();
        for (size_t i = 0; i < fields.size(); ++i) {
            if (i) os << ",";
            os << '"' << json_escape(fields[i].first) << "\":";
            const Record::Value& v = fields[i].second;
            if (std::holds_alternative<std::string>(v))
                os << '"' << json_escape(std::get<std::string>(v)) << '"';
            else
                os << value_to_string(v);
        }
        os << "}";
    }
    os << "]";
    return os.str();
}

std::string emit_report(const std::vector<std::string>& header,
                        const std::vector<Record>& records, Format format) {
    return format == Format::Csv ? to_csv(header, records) : to_json(header, records);
}

int thread_cap() {
    if (const char* env = std::getenv("QCRYPT_LAB_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<Record> parallel_records(long n, const std::function<Record(long)>& fn) {
    std::vector<Record> out(static_cast<size_t>(n));
    int workers = std::min<long>(thread_cap(), n);
    if (workers <= 1) {
        for (long i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<long> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (long i = next.fetch_add(1); i < n; i = next.fetch_add(1)) out[i] = fn(i);
        });
    for (auto& t : pool) t.join();
    return out;
}

}  // namespace qcrypt::cli
