// clustergibbs: sample measurement outcomes of high-temperature Gibbs states
// and inspect the series behind them.
//
// Exit codes: 0 ok, 1 verify failure, 2 usage or input error, 3 guarantee void
// (beta >= beta_* under --beta-policy error).

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "clustergibbs/clusters.hpp"
#include "clustergibbs/errors.hpp"
#include "clustergibbs/expansion.hpp"
#include "clustergibbs/model.hpp"
#include "clustergibbs/sampler.hpp"
#include "clustergibbs/schedule.hpp"
#include "clustergibbs/verify.hpp"

using namespace clustergibbs;
using nlohmann::json;

namespace {

constexpr int exit_ok = 0, exit_verify_failed = 1, exit_usage = 2, exit_guarantee_void = 3;

// Thrown for invalid flag combinations caught after parsing.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json schemas() {
    return {
        {"clustergibbs.sample/1",
         {{"schema", "string"},
          {"index", "uint: sample index; the record depends only on (seed, index)"},
          {"seed", "uint"},
          {"order", "int: truncation order M"},
          {"bits", "string of 0/1 in measurement order (bits[n] is the outcome of steps[n])"},
          {"steps", "array of {qubit:int, basis:string, p0:float, tail:float or null when beta >= beta_*, clamped:bool}"}}},
        {"clustergibbs.sample-summary/1",
         {{"summary", "int: number of samples"},
          {"max_tail", "float: largest per-step tail bound, null when beta >= beta_*"},
          {"beta", "float"},
          {"beta_star", "float"},
          {"below_beta_star", "bool"},
          {"order", "int"}}},
        {"clustergibbs.gamma/1", {{"j", "int"}, {"m", "int"}, {"gamma", "float"}, {"bound", "float: m beta_*^-m"}}},
        {"clustergibbs.clusters/1",
         {{"j", "int"}, {"m", "int"}, {"clusters", "array of clusters, each an array of [term_index, multiplicity]"}}},
        {"clustergibbs.marginal/1",
         {{"j", "int"},
          {"basis", "string"},
          {"outcome", "int"},
          {"p", "float: clamped estimate"},
          {"raw", "float: unclamped series value"},
          {"tail", "float, null when beta >= beta_*"},
          {"order", "int"},
          {"beta", "float"},
          {"clamped", "bool"},
          {"guarantee_void", "bool"}}},
        {"clustergibbs.expect/1",
         {{"value", "float"},
          {"tail", "float, null when beta >= beta_*"},
          {"order", "int"},
          {"beta", "float"},
          {"empirical", "optional {mean, standard_error, samples} from --samples"},
          {"guarantee_void", "bool"}}},
        {"clustergibbs.correlate/1",
         {{"i", "int"},
          {"j", "int"},
          {"value", "float"},
          {"tail", "float, null when beta >= beta_*"},
          {"distance", "int: interaction distance, -1 if unreachable"},
          {"min_weight", "int"},
          {"order", "int"},
          {"beta", "float"},
          {"guarantee_void", "bool"}}},
        {"clustergibbs.verify/1",
         {{"criterion", "int"},
          {"name", "string"},
          {"passed", "bool"},
          {"measured", "float"},
          {"bound", "float"},
          {"detail", "string"},
          {"seconds", "float"}}},
        {"clustergibbs.bench/1", "CSV with header N,mean_seconds,fitted_exponent"},
    };
}

struct Config {
    std::string model;
    std::string schedule;
    double beta = 0.0;
    std::optional<int> order;
    std::optional<double> alpha;
    std::uint64_t seed = 0;
    std::uint64_t count = 1;
    std::string dd_mode = "strict";
    std::string beta_policy = "warn";
    int jobs = 1;
    std::string out;
};

BetaPolicy policy_of(const Config& c) { return c.beta_policy == "error" ? BetaPolicy::error : BetaPolicy::warn; }

Expansion load_expansion(const Config& c) {
    ExpansionOptions o;
    o.mode = c.dd_mode == "empirical" ? DegreeMode::empirical : DegreeMode::strict;
    std::vector<std::string> warnings;
    auto spec = load_model(c.model, {}, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    return Expansion(std::move(spec), o);
}

// Validates beta and resolves the truncation order from --order or --alpha.
int resolve_order(const Config& c, const Expansion& ex) {
    if (!(c.beta > 0.0)) throw UsageError("--beta must be positive");
    if (c.order.has_value() == c.alpha.has_value()) throw UsageError("give exactly one of --order and --alpha");
    const double bs = ex.constants().beta_star;
    if (c.beta >= bs) {
        if (policy_of(c) == BetaPolicy::error || c.alpha)
            throw GuaranteeVoid("beta = " + std::to_string(c.beta) + " is not below beta_* = " + std::to_string(bs) +
                                (c.alpha ? " (no order meets --alpha)" : ""));
        std::cerr << "warning: beta = " << c.beta << " >= beta_* = " << bs
                  << "; the truncation guarantee is void and tails are reported as null\n";
    }
    if (c.order) {
        if (*c.order < 1) throw UsageError("--order must be >= 1");
        return *c.order;
    }
    return choose_order(c.beta, bs, ex.spec().num_qubits, *c.alpha);
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw UsageError("cannot open output file " + path);
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }
    void line(const json& j) { stream() << j.dump() << "\n"; }

private:
    std::unique_ptr<std::ofstream> file_;
};

Vec3 parse_axis(const std::string& text) {
    if (text.size() == 1) {
        if (std::string_view("XYZ").find(text[0]) == std::string_view::npos)
            throw UsageError("unknown basis '" + text + "'");
        return basis_axis(text[0]);
    }
    Vec3 v{};
    std::stringstream in(text);
    std::string part;
    for (int k = 0; k < 3; ++k) {
        if (!std::getline(in, part, ',')) throw UsageError("basis vector must be x,y,z: '" + text + "'");
        try {
            v[k] = std::stod(part);
        } catch (const std::exception&) {
            throw UsageError("bad basis vector component '" + part + "'");
        }
    }
    if (std::getline(in, part, ',')) throw UsageError("basis vector must have three components");
    const double n = norm(v);
    if (!(n > 0.0)) throw UsageError("basis vector is zero");
    for (auto& x : v) x /= n;
    return v;
}

// "q:B:o" -> qubit q measured along basis B with outcome o.
ProjectorProduct parse_given(const std::vector<std::string>& items) {
    ProjectorProduct e;
    for (const auto& item : items) {
        const auto a = item.find(':'), b = item.rfind(':');
        if (a == std::string::npos || a == b) throw UsageError("--given expects qubit:basis:outcome, got '" + item + "'");
        int q = 0, o = 0;
        try {
            q = std::stoi(item.substr(0, a));
            o = std::stoi(item.substr(b + 1));
        } catch (const std::exception&) {
            throw UsageError("--given expects qubit:basis:outcome, got '" + item + "'");
        }
        if (o != 0 && o != 1) throw UsageError("--given outcome must be 0 or 1");
        if (e.contains(q)) throw UsageError("--given lists qubit " + std::to_string(q) + " twice");
        e.add(q, outcome_axis(parse_axis(item.substr(a + 1, b - a - 1)), o));
    }
    return e;
}

// "c:PAULI" pairs, e.g. "0.5:Z0 Z1".
PauliSum parse_observable(const std::vector<std::string>& terms) {
    PauliSum a;
    for (const auto& t : terms) {
        const auto colon = t.find(':');
        if (colon == std::string::npos) throw UsageError("--term expects coeff:pauli, got '" + t + "'");
        double c = 0.0;
        try {
            c = std::stod(t.substr(0, colon));
        } catch (const std::exception&) {
            throw UsageError("bad coefficient in --term '" + t + "'");
        }
        a.emplace_back(c, parse_pauli(t.substr(colon + 1)));
    }
    if (a.empty()) throw UsageError("expect needs at least one --term");
    return a;
}

std::vector<SampleRecord> read_samples(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open samples file " + path);
    std::vector<SampleRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line);
        if (j.value("schema", "") != sample_schema) continue;
        SampleRecord r;
        r.seed = j.at("seed").get<std::uint64_t>();
        r.index = j.at("index").get<std::uint64_t>();
        r.order = j.at("order").get<int>();
        r.bits = j.at("bits").get<std::string>();
        for (const auto& s : j.at("steps")) {
            StepRecord st;
            st.qubit = s.at("qubit").get<int>();
            st.basis = s.at("basis").get<std::string>();
            st.axis = st.basis.size() == 1 ? basis_axis(st.basis[0]) : detail::parse_basis(json::parse(st.basis)).first;
            st.p0 = s.at("p0").get<double>();
            st.clamped = s.at("clamped").get<bool>();
            r.steps.push_back(st);
        }
        out.push_back(std::move(r));
    }
    return out;
}

// Infinite tails (beta >= beta_*) are written as null.
json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

int cmd_sample(const Config& c) {
    const Expansion ex = load_expansion(c);
    const int order = resolve_order(c, ex);
    const int n = ex.spec().num_qubits;
    const Schedule schedule = c.schedule.empty() ? Schedule::z_basis(n) : load_schedule(c.schedule);
    const SampleOptions so{c.beta, order, policy_of(c)};
    const auto records = sample_many(ex, schedule, so, c.seed, c.count, 0, c.jobs);
    Output out(c.out);
    double max_tail = 0.0;
    for (const auto& r : records) {
        out.line(to_json(r));
        max_tail = std::max(max_tail, r.max_tail());
    }
    const double bs = ex.constants().beta_star;
    json summary = {{"summary", records.size()},          {"max_tail", finite_or_null(max_tail)},
                    {"beta", c.beta},                     {"beta_star", bs},
                    {"below_beta_star", c.beta < bs},     {"order", order}};
    std::cerr << summary.dump() << "\n";
    return exit_ok;
}

int cmd_gamma(const Config& c, const std::vector<int>& qubits, const std::vector<std::string>& given,
              const std::string& basis, bool dump_clusters) {
    const Expansion ex = load_expansion(c);
    if (!c.order || c.alpha) throw UsageError("gamma needs --order (the largest m)");
    if (*c.order < 1) throw UsageError("--order must be >= 1");
    const int n = ex.spec().num_qubits;
    std::vector<int> targets = qubits;
    if (targets.empty())
        for (int q = 0; q < n; ++q) targets.push_back(q);
    const ProjectorProduct e = parse_given(given);
    const Vec3 axis = parse_axis(basis);
    const double bs = ex.constants().beta_star;
    Output out(c.out);
    for (int j : targets) {
        if (j < 0 || j >= n) throw UsageError("qubit " + std::to_string(j) + " out of range");
        if (dump_clusters) {
            for (int m = 1; m <= *c.order; ++m) {
                json list = json::array();
                for (const auto& w : enumerate_connected(j, m, ex.graph())) {
                    json cl = json::array();
                    for (const auto& [a, mu] : w.multiplicities()) cl.push_back({a, mu});
                    list.push_back(cl);
                }
                out.line({{"j", j}, {"m", m}, {"clusters", list}});
            }
            continue;
        }
        const auto g = ex.gammas(j, e, *c.order, axis);
        for (int m = 1; m <= *c.order; ++m)
            out.line({{"j", j}, {"m", m}, {"gamma", g[m - 1]}, {"bound", m * std::pow(bs, -m)}});
    }
    return exit_ok;
}

int cmd_marginal(const Config& c, int j, const std::vector<std::string>& given, const std::string& basis,
                 int outcome) {
    const Expansion ex = load_expansion(c);
    const int order = resolve_order(c, ex);
    const auto est = ex.marginal(parse_given(given), j, parse_axis(basis), outcome, c.beta, order, policy_of(c));
    Output out(c.out);
    out.line({{"j", j},
              {"basis", basis},
              {"outcome", outcome},
              {"p", est.p_prime},
              {"raw", est.raw},
              {"tail", finite_or_null(est.tail)},
              {"order", order},
              {"beta", c.beta},
              {"clamped", est.clamped},
              {"guarantee_void", est.guarantee_void}});
    return exit_ok;
}

int cmd_expect(const Config& c, const std::vector<std::string>& terms, const std::vector<std::string>& given,
               const std::string& samples) {
    const Expansion ex = load_expansion(c);
    const int order = resolve_order(c, ex);
    const PauliSum a = parse_observable(terms);
    const auto est = ex.observable_expectation(a, c.beta, order, parse_given(given), policy_of(c));
    json j = {{"value", est.value},     {"tail", finite_or_null(est.tail)}, {"order", order},
              {"beta", c.beta},         {"guarantee_void", est.guarantee_void}};
    if (!samples.empty()) {
        const auto emp = estimate_expectation(read_samples(samples), a);
        j["empirical"] = {{"mean", emp.mean}, {"standard_error", emp.standard_error}, {"samples", emp.samples}};
    }
    Output out(c.out);
    out.line(j);
    return exit_ok;
}

int cmd_correlate(const Config& c, int i, int j, const std::vector<std::string>& given, const std::string& bi,
                  const std::string& bj) {
    const Expansion ex = load_expansion(c);
    const int order = resolve_order(c, ex);
    const auto est = ex.correlation(parse_given(given), i, j, parse_axis(bi), parse_axis(bj), c.beta, order,
                                    policy_of(c));
    Output out(c.out);
    out.line({{"i", i},
              {"j", j},
              {"value", est.value},
              {"tail", finite_or_null(est.tail)},
              {"distance", est.distance},
              {"min_weight", est.distance < 0 ? json(nullptr) : json(est.min_weight)},
              {"order", order},
              {"beta", c.beta},
              {"guarantee_void", est.guarantee_void}});
    return exit_ok;
}

int cmd_verify(const Config& c, const std::vector<int>& criteria, const std::string& fault, bool seed_given) {
    verify::VerifyOptions opt;
    if (seed_given) opt.seed = c.seed;
    opt.only.insert(criteria.begin(), criteria.end());
    if (fault == "gamma-sign") opt.inject_gamma_sign_fault = true;
    else if (!fault.empty()) throw UsageError("unknown fault '" + fault + "' (known: gamma-sign)");
    Output out(c.out);
    int failed = 0;
    int ran = 0;
    verify::run(opt, [&](const verify::CriterionResult& r) {
        out.line(verify::to_json(r));
        out.stream().flush();
        failed += !r.passed;
        ++ran;
    });
    std::cerr << json{{"criteria", ran}, {"failed", failed}}.dump() << "\n";
    return failed ? exit_verify_failed : exit_ok;
}

int cmd_bench(const Config& c, const std::vector<int>& sizes, bool seed_given) {
    if (!c.order || c.alpha) throw UsageError("bench needs --order");
    const auto rows =
        verify::scaling_benchmark(sizes, *c.order, static_cast<int>(c.count), seed_given ? c.seed : verify::VerifyOptions{}.seed);
    const double exponent = rows.size() >= 2 ? verify::fitted_exponent(rows) : std::nan("");
    Output out(c.out);
    out.stream() << "N,mean_seconds,fitted_exponent\n";
    for (const auto& r : rows) out.stream() << r.n << "," << r.seconds << "," << exponent << "\n";
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cluster-expansion sampler for high-temperature Gibbs states"};
    app.require_subcommand(0, 1);
    Config c;
    bool print_schema = false;
    app.add_flag("--schema", print_schema, "Print the output schemas as JSON and exit");

    auto model_opt = [&](CLI::App* sub) {
        sub->add_option("--model", c.model, "Model JSON file")->required()->check(CLI::ExistingFile);
        sub->add_option("--dd-mode", c.dd_mode, "Overlap degree mode")
            ->check(CLI::IsMember({"strict", "empirical"}));
    };
    auto series_opts = [&](CLI::App* sub) {
        model_opt(sub);
        sub->add_option("--beta", c.beta, "Inverse temperature")->required();
        auto* o = sub->add_option("--order", c.order, "Truncation order M");
        auto* a = sub->add_option("--alpha", c.alpha, "Choose M so the tail is at most N^-alpha");
        o->excludes(a);
        sub->add_option("--beta-policy", c.beta_policy, "What to do when beta >= beta_*")
            ->check(CLI::IsMember({"error", "warn"}));
        sub->add_option("--out", c.out, "Output file (default stdout)");
    };

    auto* sample = app.add_subcommand("sample", "Draw measurement records (JSON lines)");
    series_opts(sample);
    sample->add_option("--schedule", c.schedule, "Schedule JSON file (default: Z basis, ascending)")
        ->check(CLI::ExistingFile);
    sample->add_option("--seed", c.seed, "Seed")->envname("CLUSTERGIBBS_SEED");
    sample->add_option("--count", c.count, "Number of samples");
    sample->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);

    std::vector<int> qubits;
    std::vector<std::string> given;
    std::string basis = "Z";
    auto* gamma = app.add_subcommand("gamma", "Series coefficients gamma_m of a marginal (JSON lines)");
    model_opt(gamma);
    gamma->add_option("--order", c.order, "Largest m")->required();
    gamma->add_option("--qubit", qubits, "Target qubit(s) (default: all)");
    gamma->add_option("--given", given, "Earlier outcome qubit:basis:outcome (repeatable)");
    gamma->add_option("--basis", basis, "Measurement basis of the target: X, Y, Z or x,y,z");
    gamma->add_option("--out", c.out, "Output file (default stdout)");
    bool dump_clusters = false;
    gamma->add_flag("--dump-clusters", dump_clusters, "Emit the connected clusters instead of gamma");

    int target = 0, outcome = 0;
    auto* marginal = app.add_subcommand("marginal", "Conditional marginal with tail bound");
    series_opts(marginal);
    marginal->add_option("--qubit", target, "Qubit to measure next")->required();
    marginal->add_option("--basis", basis, "Measurement basis: X, Y, Z or x,y,z");
    marginal->add_option("--outcome", outcome, "Outcome 0 or 1")->check(CLI::Range(0, 1));
    marginal->add_option("--given", given, "Earlier outcome qubit:basis:outcome (repeatable)");

    std::vector<std::string> terms;
    std::string samples_path;
    auto* expect = app.add_subcommand("expect", "Expectation of a local observable, optionally after measurements");
    series_opts(expect);
    expect->add_option("--term", terms, "Observable term coeff:pauli, e.g. 0.5:Z0 Z1 (repeatable)")->required();
    expect->add_option("--given", given, "Measured qubit qubit:basis:outcome (repeatable)");
    expect->add_option("--samples", samples_path, "Also report the sample mean over this JSON-lines file")
        ->check(CLI::ExistingFile);

    int ci = 0, cj = 1;
    std::string basis_i = "Z", basis_j = "Z";
    auto* correlate = app.add_subcommand("correlate", "Connected correlator of two single-qubit operators");
    series_opts(correlate);
    correlate->add_option("-i,--i", ci, "First qubit")->required();
    correlate->add_option("-j,--j", cj, "Second qubit")->required();
    correlate->add_option("--basis-i", basis_i, "Operator axis at i: X, Y, Z or x,y,z");
    correlate->add_option("--basis-j", basis_j, "Operator axis at j: X, Y, Z or x,y,z");
    correlate->add_option("--given", given, "Measured qubit qubit:basis:outcome (repeatable)");

    std::vector<int> criteria;
    std::string fault;
    auto* verify_cmd = app.add_subcommand("verify", "Run the acceptance suite (JSON lines, exit 1 on failure)");
    auto* verify_seed = verify_cmd->add_option("--seed", c.seed, "Suite seed")->envname("CLUSTERGIBBS_SEED");
    verify_cmd->add_option("--criteria", criteria, "Only these criteria (1-10)")
        ->delimiter(',')
        ->check(CLI::Range(1, 10));
    verify_cmd->add_option("--inject-fault", fault, "Self-test: gamma-sign");
    verify_cmd->add_option("--out", c.out, "Output file (default stdout)");

    std::vector<int> sizes{25, 50, 100, 200};
    auto* bench = app.add_subcommand("bench", "Time sample_one on random chains (CSV)");
    bench->add_option("--sizes", sizes, "Chain lengths")->delimiter(',');
    bench->add_option("--order", c.order, "Truncation order M")->required();
    auto* bench_seed = bench->add_option("--seed", c.seed, "Seed")->envname("CLUSTERGIBBS_SEED");
    c.count = 10;
    bench->add_option("--count", c.count, "Samples per size");
    bench->add_option("--out", c.out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (print_schema) {
            std::cout << schemas().dump(2) << "\n";
            return exit_ok;
        }
        if (*sample) return cmd_sample(c);
        if (*gamma) return cmd_gamma(c, qubits, given, basis, dump_clusters);
        if (*marginal) return cmd_marginal(c, target, given, basis, outcome);
        if (*expect) return cmd_expect(c, terms, given, samples_path);
        if (*correlate) return cmd_correlate(c, ci, cj, given, basis_i, basis_j);
        if (*verify_cmd) return cmd_verify(c, criteria, fault, verify_seed->count() > 0);
        if (*bench) return cmd_bench(c, sizes, bench_seed->count() > 0);
        std::cerr << app.help();
        return exit_usage;
    } catch (const GuaranteeVoid& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_guarantee_void;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }
}
