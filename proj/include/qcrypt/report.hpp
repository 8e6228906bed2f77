#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace qcrypt::cli {

// Flat key/value record; doubles render at 12 significant digits so a report
// is byte-stable for a fixed config and seed.
class Record {
  public:
    using Value = std::variant<std::string, double, long>;

    Record& add(const std::string& key, std::string value);
    Record& add(const std::string& key, const char* value);
    Record& add(const std::string& key, double value);
    Record& add(const std::string& key, long value);
    Record& add(const std::string& key, int value) { return add(key, static_cast<long>(value)); }
    Record& add(const std::string& key, bool value) { return add(key, value ? 1L : 0L); }

    const std::vector<std::pair<std::string, Value>>& fields() const { return fields_; }
    std::vector<std::string> keys() const;

  private:
    std::vector<std::pair<std::string, Value>> fields_;
};

std::string format_double(double v);

// RFC 4180: quotes around fields containing commas, quotes or newlines,
// embedded quotes doubled.  Throws when a record's keys disagree with the
// header (mixed-type record lists are a usage error).
std::string to_csv(const std::vector<std::string>& header, const std::vector<Record>& records);

// single JSON array of objects
std::string to_json(const std::vector<std::string>& header, const std::vector<Record>& records);

enum class Format { Csv, Json };

std::string emit_report(const std::vector<std::string>& header,
                        const std::vector<Record>& records, Format format);

// Thread cap from QCRYPT_LAB_THREADS (>=1); defaults to the hardware count.
int thread_cap();

// Evaluates fn(0..n-1) with at most thread_cap() workers; results land in
// index order, so parallel and serial execution emit identical reports.
std::vector<Record> parallel_records(long n, const std::function<Record(long)>& fn);

}  // namespace qcrypt::cli
