// Batch experiment runner: every subcommand assembles flat records and emits
// a deterministic CSV or JSON report for a given config and seed.

#include "qcrypt/attacklab.hpp"
#include "qcrypt/cointoss.hpp"
#include "qcrypt/extract.hpp"
#include "qcrypt/randexp.hpp"
#include "qcrypt/relnet.hpp"
#include "qcrypt/report.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace qcrypt;
using cli::Record;

struct Output {
    std::string path;          // empty: stdout
    std::string format = "json";
};

int write_report(const Output& out, const std::vector<std::string>& header,
                 const std::vector<Record>& records) {
    cli::Format fmt = out.format == "csv" ? cli::Format::Csv : cli::Format::Json;
    std::string body = cli::emit_report(header, records, fmt);
    if (out.path.empty()) {
        std::cout << body;
        if (fmt == cli::Format::Json) std::cout << "\n";
        return 0;
    }
    std::ofstream file(out.path, std::ios::binary);
    if (!file) {
        std::cerr << "cannot open output path: " << out.path << "\n";
        return 1;
    }
    file << body;
    return 0;
}

std::vector<double> parse_doubles(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

cointoss::PartyStrategy parse_strategy(const std::string& s) {
    if (s == "honest") return cointoss::PartyStrategy::honest();
    if (s == "cheat0") return cointoss::PartyStrategy::cheat_towards(0);
    if (s == "cheat1") return cointoss::PartyStrategy::cheat_towards(1);
    throw CLI::ValidationError("strategy must be honest|cheat0|cheat1");
}

relnet::RelCtStrategy parse_rel_strategy(const std::string& s) {
    if (s == "honest") return relnet::RelCtStrategy::honest();
    if (s == "fixed0") return relnet::RelCtStrategy::fixed(0);
    if (s == "fixed1") return relnet::RelCtStrategy::fixed(1);
    if (s == "wait") return relnet::RelCtStrategy::wait_for_other();
    throw CLI::ValidationError("strategy must be honest|fixed0|fixed1|wait");
}

Record toss_record(const std::string& protocol, const std::string& alice,
                   const std::string& bob, const cointoss::TossReport& r) {
    Record rec;
    rec.add("protocol", protocol)
        .add("alice", alice)
        .add("bob", bob)
        .add("mode", r.analytic() ? "analytic" : "sampled")
        .add("trials", r.trials)
        .add("p_zero", r.p_zero)
        .add("p_one", r.p_one)
        .add("p_abort", r.p_abort)
        .add("detection_prob", r.detection_prob);
    return rec;
}

// --- subcommands ------------------------------------------------------------

int run_cointoss(const std::string& protocol, const std::string& alice, const std::string& bob,
                 long trials, uint64_t seed, bool bias, const Output& out) {
    std::vector<Record> records;
    if (bias) {
        for (const auto& row : cointoss::bias_report(protocol)) {
            Record rec;
            rec.add("protocol", row.protocol)
                .add("strategy", row.strategy)
                .add("bias", row.bias)
                .add("detection", row.detection);
            records.push_back(std::move(rec));
        }
        return write_report(out, {"protocol", "strategy", "bias", "detection"}, records);
    }

    cointoss::TossReport report;
    if (protocol == "relativistic") {
        if (trials <= 0) throw CLI::ValidationError("relativistic runs are sampled; set --trials");
        relnet::SiteLayout layout({0.0, 10.0});
        report = relnet::run_rel_coin_toss(parse_rel_strategy(alice), parse_rel_strategy(bob),
                                           layout, trials, seed);
    } else if (protocol == "ambainis" || protocol == "colbeck") {
        auto a = parse_strategy(alice);
        auto b = parse_strategy(bob);
        auto run = [&](auto&&... args) {
            return protocol == "ambainis" ? cointoss::run_ambainis(args...)
                                          : cointoss::run_colbeck(args...);
        };
        report = trials > 0 ? run(a, b, cointoss::SampledMode{trials, seed}) : run(a, b);
    } else {
        throw CLI::ValidationError("protocol must be ambainis|colbeck|relativistic");
    }
    records.push_back(toss_record(protocol, alice, bob, report));
    return write_report(out,
                        {"protocol", "alice", "bob", "mode", "trials", "p_zero", "p_one",
                         "p_abort", "detection_prob"},
                        records);
}

int run_vbct(const std::string& protocol, double theta, int wish, double poisson_mean,
             double alpha0_sq, double alpha1_sq, int batch, int m_exponent,
             const std::string& adversary, double delta, double gamma, long trials,
             uint64_t seed, int info_bound_n, const std::string& trace_path,
             const Output& out) {
    std::vector<Record> records;
    relnet::EventLog log;
    relnet::EventLog* log_ptr = trace_path.empty() ? nullptr : &log;

    if (info_bound_n > 0) {
        for (int n = 2; n <= info_bound_n; ++n) {
            auto b = relnet::vbct2_alice_info_bound(alpha0_sq, alpha1_sq, n);
            Record rec;
            rec.add("n_states", n).add("d_full", b.d_full).add("d_single", b.d_single);
            records.push_back(std::move(rec));
        }
        return write_report(out, {"n_states", "d_full", "d_single"}, records);
    }

    if (protocol == "vbct1") {
        relnet::Vbct1Config config{theta, wish, poisson_mean, trials, seed};
        relnet::Vbct1Adversary adv = relnet::Vbct1Adversary::none();
        if (adversary == "biased") adv = relnet::Vbct1Adversary::biased(delta, gamma);
        else if (adversary != "none") throw CLI::ValidationError("vbct1 adversary: none|biased");
        auto r = relnet::run_vbct1(config, adv, log_ptr);
        Record rec;
        rec.add("protocol", protocol)
            .add("p_zero", r.toss.p_zero)
            .add("p_one", r.toss.p_one)
            .add("p_abort", r.toss.p_abort)
            .add("undetected_cheat_rate", r.undetected_cheat_rate)
            .add("cheat_bound", r.cheat_bound);
        records.push_back(std::move(rec));
        if (log_ptr) std::ofstream(trace_path) << log.to_json();
        return write_report(
            out, {"protocol", "p_zero", "p_one", "p_abort", "undetected_cheat_rate", "cheat_bound"},
            records);
    }
    if (protocol == "vbct2") {
        relnet::Vbct2Config config;
        config.alpha0_sq = alpha0_sq;
        config.alpha1_sq = alpha1_sq;
        config.n_states = batch;
        config.m_exponent = m_exponent;
        config.bob_wish = wish >= 0 ? wish : 0;
        config.trials = trials;
        config.seed = seed;
        relnet::Vbct2Adversary adv = relnet::Vbct2Adversary::none();
        if (adversary == "overbias") adv = relnet::Vbct2Adversary::bob_overbias(delta);
        else if (adversary == "splitz") adv = relnet::Vbct2Adversary::alice_split_z();
        else if (adversary != "none")
            throw CLI::ValidationError("vbct2 adversary: none|overbias|splitz");
        auto r = relnet::run_vbct2(config, adv, log_ptr);
        Record rec;
        rec.add("protocol", protocol)
            .add("p_zero", r.toss.p_zero)
            .add("p_one", r.toss.p_one)
            .add("p_abort", r.toss.p_abort)
            .add("detection_rate", r.detection_rate)
            .add("exposed_rate", r.exposed_rate)
            .add("bias_learned_rate", r.bias_learned_rate);
        records.push_back(std::move(rec));
        if (log_ptr) std::ofstream(trace_path) << log.to_json();
        return write_report(out,
                            {"protocol", "p_zero", "p_one", "p_abort", "detection_rate",
                             "exposed_rate", "bias_learned_rate"},
                            records);
    }
    throw CLI::ValidationError("protocol must be vbct1|vbct2");
}

int run_twoparty(bool sweep, int max_alphabet, const std::string& table_csv, double eta0,
                 bool scan, bool ot, const Output& out) {
    std::vector<Record> records;
    if (sweep) {
        attacklab::SweepReport report = attacklab::sweep_3x3(max_alphabet);
        for (const auto& row : report.rows) {
            Record rec;
            rec.add("canonical_id", row.canonical_id)
                .add("a", row.a)
                .add("b", row.b)
                .add("free_entries", row.free_entries)
                .add("p_h", row.p_h)
                .add("p_srm", row.p_srm)
                .add("gap", row.gap);
            records.push_back(std::move(rec));
        }
        return write_report(out, {"canonical_id", "a", "b", "free_entries", "p_h", "p_srm", "gap"},
                            records);
    }
    if (ot) {
        auto demo = attacklab::ot_demo();
        Record rec;
        rec.add("p_honest", demo.p_honest)
            .add("p_attack", demo.p_attack)
            .add("attack_optimal", demo.attack_optimal)
            .add("e0_match", demo.e0_match);
        records.push_back(std::move(rec));
        return write_report(out, {"p_honest", "p_attack", "attack_optimal", "e0_match"}, records);
    }
    if (!table_csv.empty()) {
        std::vector<double> v = parse_doubles(table_csv);
        if (v.size() != 4) throw CLI::ValidationError("--table wants p00,p01,p10,p11");
        attacklab::ProbFunctionTable p(v[0], v[2], v[1], v[3]);  // paper order in, (i,j) storage
        Record rec;
        if (scan) {
            auto r = attacklab::thm3_scan(p, attacklab::default_eta_grid());
            rec.add("found", r.found).add("eta_star", r.eta_star);
            records.push_back(std::move(rec));
            return write_report(out, {"found", "eta_star"}, records);
        }
        auto r = attacklab::helstrom_cheat_2x2(p, eta0, attacklab::Sided::Two);
        rec.add("eta0", eta0)
            .add("p_c", r.p_c)
            .add("p_h", attacklab::honest_best(p, eta0))
            .add("lambda_plus", r.lambdas[0])
            .add("lambda_minus", r.lambdas[1])
            .add("mu_plus", r.lambdas[2])
            .add("mu_minus", r.lambdas[3]);
        records.push_back(std::move(rec));
        return write_report(
            out, {"eta0", "p_c", "p_h", "lambda_plus", "lambda_minus", "mu_plus", "mu_minus"},
            records);
    }
    throw CLI::ValidationError("twoparty wants --sweep-3x3, --ot-demo, or --table");
}

int run_randexp(const std::string& mode, const std::string& device, int x_bits, double epsilon,
                double zeta, const std::string& credit, int labs, int k, uint64_t seed,
                const Output& out) {
    std::vector<Record> records;
    if (mode == "analysis") {
        auto a = randexp::classical_attack_analysis(epsilon);
        Record rec;
        rec.add("epsilon", epsilon)
            .add("max_attacks", a.max_attacks)
            .add("compression_bits", a.compression_bits);
        records.push_back(std::move(rec));
        return write_report(out, {"epsilon", "max_attacks", "compression_bits"}, records);
    }
    if (mode == "rates") {
        for (int kk = 1; kk <= k; ++kk) {
            auto r = randexp::test_rates(kk);
            Record rec;
            rec.add("k", kk).add("devices", r.devices).add("constraints", r.constraints).add(
                "nu", r.nu);
            records.push_back(std::move(rec));
        }
        return write_report(out, {"k", "devices", "constraints", "nu"}, records);
    }

    auto make_device = [&]() {
        if (device == "honest") return randexp::DeviceTriple::honest_ghz();
        if (device == "classical")
            return randexp::DeviceTriple::classical_programmed({{{1, 1}, {1, 1}, {1, 1}}});
        if (device == "replay") return randexp::DeviceTriple::replay();
        throw CLI::ValidationError("device must be honest|classical|replay");
    };

    randexp::ExpansionConfig config;
    config.epsilon = epsilon;
    config.zeta = zeta;
    config.mode = credit == "classical" ? randexp::CreditMode::ClassicalThreat
                                        : randexp::CreditMode::Conjectured;
    config.seed = seed;

    // Alice's string drawn from the run seed
    Rng rng = make_rng(seed, 0xa11ceULL);
    extract::BitString x;
    for (int i = 0; i < x_bits; ++i) x.append(static_cast<uint8_t>(uniform_bit(rng)));

    auto record_result = [&](const std::string& label, const randexp::ExpansionResult& r) {
        Record rec;
        rec.add("run", label)
            .add("outcome", r.aborted ? "abort" : "output")
            .add("consumed", r.consumed_bits)
            .add("produced", r.produced_bits)
            .add("tests", r.tests_run)
            .add("abort_round", static_cast<long>(r.abort_round))
            .add("credit_mode", r.credit_mode_label)
            .add("output_hex", r.output.length() > 0 ? r.output.to_hex() : "");
        records.push_back(std::move(rec));
    };

    bool any_abort = false;
    if (mode == "protocol-a") {
        randexp::DeviceTriple triple = make_device();
        auto r = randexp::run_protocol_a(x, triple, config);
        record_result("feed-1", r);
        any_abort = r.aborted;
        if (device == "replay") {
            auto again = randexp::run_protocol_a(x, triple, config);
            record_result("feed-2", again);
            any_abort = any_abort || again.aborted;
        }
    } else if (mode == "protocol-n") {
        std::vector<randexp::DeviceTriple> triples;
        for (int i = 0; i < labs; ++i) triples.push_back(make_device());
        auto r = randexp::run_protocol_n(x, triples, config);
        record_result("labs-" + std::to_string(labs), r);
        any_abort = r.aborted;
    } else {
        throw CLI::ValidationError("mode must be protocol-a|protocol-n|analysis|rates");
    }
    int rc = write_report(out,
                          {"run", "outcome", "consumed", "produced", "tests", "abort_round",
                           "credit_mode", "output_hex"},
                          records);
    return rc != 0 ? rc : (any_abort ? 2 : 0);
}

int run_entropy(const std::string& dist_csv, double alpha, bool use_inf_alpha, bool collision,
                const std::string& joint_csv, double smooth_eps, const std::string& pa_csv,
                const std::string& pa_mode, const std::string& maxlen_csv, const Output& out) {
    std::vector<Record> records;
    std::vector<std::string> header = {"quantity", "value"};
    auto push = [&records](const std::string& name, double value) {
        Record rec;
        rec.add("quantity", name).add("value", value);
        records.push_back(std::move(rec));
    };

    if (!dist_csv.empty()) {
        std::vector<double> v = parse_doubles(dist_csv);
        RealVector p(v.size());
        for (size_t i = 0; i < v.size(); ++i) p(i) = v[i];
        FiniteDistribution d = FiniteDistribution::indexed(p);
        double a = use_inf_alpha ? extract::kInfinity : alpha;
        push("renyi_entropy", extract::renyi_entropy(d, a));
        if (collision) {
            auto c = extract::collision_uniformity(d);
            push("collision_prob", c.collision_prob);
            push("distance_bound", c.distance_bound);
        }
    }
    if (!joint_csv.empty()) {
        // rows separated by ';', entries by ','
        std::vector<std::vector<double>> rows;
        std::stringstream ss(joint_csv);
        std::string row;
        while (std::getline(ss, row, ';')) rows.push_back(parse_doubles(row));
        Eigen::MatrixXd m(rows.size(), rows[0].size());
        for (size_t i = 0; i < rows.size(); ++i)
            for (size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
        std::vector<std::string> xs(m.rows()), ys(m.cols());
        for (long i = 0; i < m.rows(); ++i) xs[i] = "x" + std::to_string(i);
        for (long j = 0; j < m.cols(); ++j) ys[j] = "y" + std::to_string(j);
        extract::JointDistribution joint(xs, ys, m);
        push("conditional_min_entropy", extract::conditional_min_entropy(joint));
        push("smooth_min_entropy",
             extract::smooth_entropy(joint, smooth_eps, extract::SmoothKind::Min));
        push("smooth_max_entropy",
             extract::smooth_entropy(joint, smooth_eps, extract::SmoothKind::Max));
    }
    if (!pa_csv.empty()) {
        std::vector<double> v = parse_doubles(pa_csv);
        if (v.size() != 4) throw CLI::ValidationError("--pa-bounds wants h,eps,eps1,eps2");
        auto mode = pa_mode == "reconciliation" ? extract::BoundMode::Reconciliation
                                                : extract::BoundMode::Amplification;
        auto b = extract::pa_ir_bounds(v[0], v[1], v[2], v[3], mode);
        push("pa_lower", b.lower);
        push("pa_upper", b.upper);
    }
    if (!maxlen_csv.empty()) {
        std::vector<double> v = parse_doubles(maxlen_csv);
        if (v.size() != 2) throw CLI::ValidationError("--max-length wants kappa,eps");
        push("max_extract_length", extract::max_extract_length(v[0], v[1]));
    }
    return write_report(out, header, records);
}

int run_nonlocal(const std::string& game, int k, const Output& out) {
    std::vector<std::string> games;
    if (game == "all") games = {"ghz", "chsh", "prc"};
    else games = {game};

    std::vector<Record> records = cli::parallel_records(
        static_cast<long>(games.size()), [&](long idx) {
            const std::string& g = games[static_cast<size_t>(idx)];
            randexp::Game which = g == "ghz" ? randexp::Game::Ghz
                                 : g == "chsh" ? randexp::Game::Chsh
                                               : randexp::Game::Prc;
            auto classical = randexp::classical_brute_force(which, g == "prc" ? k : 1);
            auto quantum = randexp::quantum_values(which, g == "prc" ? std::min(k, 2) : 1);
            Record rec;
            rec.add("game", g)
                .add("k", g == "prc" ? k : 1)
                .add("classical_value", classical.max_value)
                .add("total_constraints", classical.total_constraints)
                .add("quantum_value", g == "chsh" ? quantum.value : (quantum.passes ? 1.0 : 0.0))
                .add("quantum_passes", quantum.passes);
            return rec;
        });
    return write_report(out,
                        {"game", "k", "classical_value", "total_constraints", "quantum_value",
                         "quantum_passes"},
                        records);
}

// config-file values become leading flags so explicit flags override them
std::vector<std::string> inject_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string config_path;
    for (size_t i = 0; i + 1 < args.size(); ++i)
        if (args[i] == "--config") {
            config_path = args[i + 1];
            args.erase(args.begin() + i, args.begin() + i + 2);
            break;
        }
    if (config_path.empty()) return args;

    std::ifstream file(config_path);
    if (!file) throw CLI::ValidationError("cannot read config file: " + config_path);
    nlohmann::json config = nlohmann::json::parse(file);

    std::vector<std::string> merged;
    std::string subcommand;
    if (!args.empty() && !args[0].empty() && args[0][0] != '-') {
        subcommand = args[0];
        args.erase(args.begin());
    } else if (config.contains("subcommand")) {
        subcommand = config["subcommand"].get<std::string>();
    }
    if (!subcommand.empty()) merged.push_back(subcommand);
    for (const auto& [key, value] : config.items()) {
        if (key == "subcommand") continue;
        merged.push_back("--" + key);
        if (value.is_string()) merged.push_back(value.get<std::string>());
        else if (value.is_boolean()) { if (!value.get<bool>()) merged.pop_back(); }
        else merged.push_back(value.dump());
    }
    merged.insert(merged.end(), args.begin(), args.end());
    return merged;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum and relativistic protocol experiment runner"};
    app.require_subcommand(1);

    Output out;
    uint64_t seed = 0;
    bool seed_set_default = true;
    (void)seed_set_default;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--output", out.path, "report path (default stdout)")
            ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        sub->add_option("--format", out.format, "csv|json")
            ->check(CLI::IsMember({"csv", "json"}))
            ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        sub->add_option("--seed", seed, "64-bit run seed (required for sampled runs)")
            ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    };

    // cointoss
    auto* ct = app.add_subcommand("cointoss", "coin-tossing protocols");
    std::string ct_protocol = "colbeck", ct_alice = "honest", ct_bob = "honest";
    long ct_trials = 0;
    bool ct_bias = false;
    ct->add_option("--protocol", ct_protocol, "ambainis|colbeck|relativistic")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    ct->add_option("--alice", ct_alice)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    ct->add_option("--bob", ct_bob)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    ct->add_option("--trials", ct_trials, "0 = analytic")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    ct->add_flag("--bias-report", ct_bias, "emit the per-strategy bias table");
    add_common(ct);

    // vbct
    auto* vb = app.add_subcommand("vbct", "variable bias coin tossing");
    std::string vb_protocol = "vbct1", vb_adversary = "none", vb_trace;
    double vb_theta = 0.7853981633974483, vb_poisson = 50.0, vb_a0 = 0.9, vb_a1 = 0.1;
    double vb_delta = 0.0, vb_gamma = 0.0;
    int vb_wish = 0, vb_batch = 4, vb_m = 3, vb_info_n = 0;
    long vb_trials = 100000;
    vb->add_option("--protocol", vb_protocol)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    vb->add_option("--theta", vb_theta)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    vb->add_option("--wish", vb_wish, "0|1|-1 (uniform)")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    vb->add_option("--poisson-mean", vb_poisson)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    vb->add_option("--alpha0-sq", vb_a0)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    vb->add_option("--alpha1-sq", vb_a1)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    vb->add_option("--batch", vb_batch)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    vb->add_option("--m-exponent", vb_m)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    vb->add_option("--adversary", vb_adversary, "none|biased|overbias|splitz")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    vb->add_option("--delta", vb_delta)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    vb->add_option("--gamma", vb_gamma)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    vb->add_option("--trials", vb_trials)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    vb->add_option("--info-bound", vb_info_n, "emit d_full/d_single up to this N")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    vb->add_option("--trace", vb_trace, "write a representative event-log JSON here")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    add_common(vb);

    // twoparty
    auto* tp = app.add_subcommand("twoparty", "two-party computation attacks");
    bool tp_sweep = false, tp_scan = false, tp_ot = false;
    int tp_alphabet = 4;
    std::string tp_table;
    double tp_eta0 = 0.5;
    tp->add_flag("--sweep-3x3", tp_sweep, "enumerate all canonical 3x3 tables");
    tp->add_option("--max-alphabet", tp_alphabet)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    tp->add_option("--table", tp_table, "p00,p01,p10,p11")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    tp->add_option("--eta0", tp_eta0)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    tp->add_flag("--scan", tp_scan, "scan the prior grid for a quantum advantage");
    tp->add_flag("--ot-demo", tp_ot, "the oblivious transfer attack demonstration");
    add_common(tp);

    // randexp
    auto* re = app.add_subcommand("randexp", "device-independent randomness expansion");
    std::string re_mode = "protocol-a", re_device = "honest", re_credit = "conjectured";
    int re_xbits = 400, re_labs = 2, re_k = 2;
    double re_eps = 1e-6, re_zeta = 2.0;
    re->add_option("--mode", re_mode, "protocol-a|protocol-n|analysis|rates")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    re->add_option("--device", re_device, "honest|classical|replay")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    re->add_option("--x-bits", re_xbits)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    re->add_option("--epsilon", re_eps)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    re->add_option("--zeta", re_zeta)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    re->add_option("--credit", re_credit, "conjectured|classical")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    re->add_option("--labs", re_labs)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    re->add_option("--k", re_k)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    add_common(re);

    // entropy
    auto* en = app.add_subcommand("entropy", "entropies, hashing bounds");
    std::string en_dist, en_joint, en_pa, en_maxlen, en_pa_mode = "amplification";
    double en_alpha = 1.0, en_smooth = 0.0;
    bool en_inf = false, en_collision = false;
    en->add_option("--dist", en_dist, "comma-separated probabilities")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    en->add_option("--alpha", en_alpha)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    en->add_flag("--alpha-inf", en_inf, "use the min-entropy order");
    en->add_flag("--collision", en_collision);
    en->add_option("--joint", en_joint, "rows ';'-separated, entries ','-separated")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    en->add_option("--smooth-eps", en_smooth)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    en->add_option("--pa-bounds", en_pa, "h,eps,eps1,eps2")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    en->add_option("--pa-mode", en_pa_mode, "amplification|reconciliation")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    en->add_option("--max-length", en_maxlen, "kappa,eps")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    add_common(en);

    // nonlocal
    auto* nl = app.add_subcommand("nonlocal", "nonlocal game values");
    std::string nl_game = "all";
    int nl_k = 2;
    nl->add_option("--game", nl_game, "ghz|chsh|prc|all")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    nl->add_option("--k", nl_k)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    add_common(nl);

    std::vector<std::string> args;
    try {
        args = inject_config(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        std::vector<const char*> argv2;
        argv2.push_back(argv[0]);
        for (const auto& a : args) argv2.push_back(a.c_str());
        app.parse(static_cast<int>(argv2.size()), argv2.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (ct->parsed())
            return run_cointoss(ct_protocol, ct_alice, ct_bob, ct_trials, seed, ct_bias, out);
        if (vb->parsed())
            return run_vbct(vb_protocol, vb_theta, vb_wish, vb_poisson, vb_a0, vb_a1, vb_batch,
                            vb_m, vb_adversary, vb_delta, vb_gamma, vb_trials, seed, vb_info_n,
                            vb_trace, out);
        if (tp->parsed())
            return run_twoparty(tp_sweep, tp_alphabet, tp_table, tp_eta0, tp_scan, tp_ot, out);
        if (re->parsed())
            return run_randexp(re_mode, re_device, re_xbits, re_eps, re_zeta, re_credit, re_labs,
                               re_k, seed, out);
        if (en->parsed())
            return run_entropy(en_dist, en_alpha, en_inf, en_collision, en_joint, en_smooth,
                               en_pa, en_pa_mode, en_maxlen, out);
        if (nl->parsed()) return run_nonlocal(nl_game, nl_k, out);
    } catch (const CLI::Error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
