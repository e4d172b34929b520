// aoilab command-line front end.
//
// Exit codes: 0 ok, 1 a check or sweep found a violation, 2 usage, parse or
// input error.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "aoilab/aoilab.hpp"

namespace fs = std::filesystem;
using namespace aoilab;

namespace {

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kUsage = 2;

struct Globals {
  std::string out = "out";
  std::uint64_t seed = 1;
  std::size_t cap = 20;
  unsigned jobs = 1;
  std::string oracle = "auto";

  OracleOptions oracle_options() const { return {cap, std::max(1u, jobs)}; }
  OracleMethod method() const {
    if (oracle == "enumerate") return OracleMethod::Enumerate;
    if (oracle == "frontier") return OracleMethod::Frontier;
    return OracleMethod::Auto;
  }
};

struct FamilyFlags {
  std::string family = "uniform";
  std::uint64_t m = 20;
  std::string epsilon = "1/100";
  std::string horizon;
  std::size_t n = 8;
  std::string g_max = "4";
  std::string s_max = "2";
  std::string rate = "1";
  std::string mean_size = "1";
  unsigned bits = 8;

  void add(CLI::App& app) {
    app.add_option("--family", family, "example1 | example2 | example3 | uniform | poisson")
        ->check(CLI::IsMember({"example1", "example2", "example3", "uniform", "poisson"}));
    app.add_option("--m", m, "example2 burst size");
    app.add_option("--epsilon", epsilon, "example2 burst window");
    app.add_option("--horizon", horizon, "horizon T (example2 default 2m)");
    app.add_option("-n,--n", n, "number of updates (random families)");
    app.add_option("--g-max", g_max, "uniform: generations in [0, g-max)");
    app.add_option("--s-max", s_max, "uniform: sizes in (0, s-max]");
    app.add_option("--rate", rate, "poisson: mean arrivals per unit time");
    app.add_option("--mean-size", mean_size, "poisson: mean size");
    app.add_option("--bits", bits, "uniform: dyadic resolution 2^-bits");
  }

  std::optional<Ratio> horizon_value() const {
    if (horizon.empty()) return std::nullopt;
    return Ratio::parse(horizon);
  }

  GeneratorSpec spec(std::uint64_t seed) const {
    if (family == "example1") return gen::Example1{};
    if (family == "example3") return gen::Example3{};
    if (family == "example2")
      return gen::Example2{m, Ratio::parse(epsilon), horizon_value().value_or(Ratio(2 * static_cast<long>(m)))};
    if (family == "poisson")
      return gen::RandomPoissonLike{n, Ratio::parse(rate), Ratio::parse(mean_size), seed, horizon_value()};
    return gen::RandomUniform{n, Ratio::parse(g_max), Ratio::parse(s_max), seed, horizon_value(), bits};
  }
};

bool is_oracle(std::string_view name) { return name == "oracle"; }

// Trace and report of a policy id or of the offline optimum.
std::pair<Trace, AoiReport> solve(const Instance& inst, const std::string& policy, const Globals& g) {
  if (is_oracle(policy)) {
    auto res = solve_offline(inst, g.method(), g.oracle_options());
    return {res.best_trace, res.best_report};
  }
  auto trace = simulate(inst, parse_policy(policy));
  auto rep = average_aoi(trace, inst);
  return {std::move(trace), std::move(rep)};
}

std::string ratio_cell(const Ratio& r) { return r.str() + " (" + r.decimal(6) + ")"; }

// ---------------------------------------------------------------- gen

int cmd_gen(const Globals& g, const FamilyFlags& f, const std::string& file, std::size_t count) {
  if (count <= 1) {
    std::string text = io::format_instance(generate(f.spec(g.seed)));
    if (file.empty())
      std::cout << text;
    else
      io::write_file(file, text);
    return kOk;
  }
  for (std::size_t k = 0; k < count; ++k) {
    std::ostringstream name;
    name << "instance-" << std::setw(5) << std::setfill('0') << k << ".json";
    io::write_file(fs::path(g.out) / name.str(), io::format_instance(generate(f.spec(g.seed + k))));
  }
  std::cout << "wrote " << count << " instances to " << g.out << "\n";
  return kOk;
}

// ---------------------------------------------------------------- run

int cmd_run(const Globals& g, const std::string& path, const std::string& policy) {
  if (!is_oracle(policy)) parse_policy(policy);
  Instance inst = io::read_instance(path);
  std::string id = io::instance_id(inst);
  auto [trace, rep] = solve(inst, policy, g);
  trace.instance_id = id;

  fs::path dir(g.out);
  std::string stem = id.substr(0, 12) + "." + policy;
  fs::path csv = dir / (stem + ".trace.csv");
  io::write_file(csv, io::format_trace_csv(trace));
  io::write_file(dir / (stem + ".trace.json"), io::format_trace_json(trace));
  io::write_file(dir / (stem + ".report.json"), io::format_report(rep, id, policy));
  io::write_file(dir / (stem + ".metrics.csv"), io::format_metrics_csv(inst, per_update_metrics(trace, inst)));

  RunRecord record{id, policy, rep, csv.string(), utc_timestamp()};
  ResultsLog(dir).append(record);

  std::cout << "policy      " << policy << "\n"
            << "instance    " << id << "\n"
            << "integral    " << rep.integral << " (" << rep.integral.decimal() << ")\n"
            << "average     " << rep.average << " (" << rep.average.decimal() << ")\n"
            << "completions " << rep.completions << "\n"
            << "trace       " << csv.string() << "\n";
  return kOk;
}

// ---------------------------------------------------------------- compare

int cmd_compare(const Globals& g, const std::string& path, std::vector<std::string> policies) {
  if (policies.empty()) {
    for (auto id : kAllPolicies) policies.emplace_back(policy_name(id));
    policies.emplace_back("oracle");
  }
  for (const auto& p : policies)
    if (!is_oracle(p)) parse_policy(p);
  Instance inst = io::read_instance(path);
  Ratio best = solve_offline(inst, g.method(), g.oracle_options()).best_report.integral;

  std::cout << std::left << std::setw(24) << "policy" << std::setw(36) << "integral" << std::setw(36) << "average"
            << std::setw(30) << "ratio" << "completions\n";
  for (const auto& p : policies) {
    auto [trace, rep] = solve(inst, p, g);
    std::string ratio = best.sign() > 0 ? ratio_cell(competitive_ratio(rep.integral, best)) : "-";
    std::cout << std::setw(24) << p << std::setw(36) << (rep.integral.str() + " (" + rep.integral.decimal(8) + ")")
              << std::setw(36) << (rep.average.str() + " (" + rep.average.decimal(8) + ")") << std::setw(30)
              << ratio << rep.completions << "\n";
  }
  return kOk;
}

// ---------------------------------------------------------------- sweep

int cmd_sweep(const Globals& g, const FamilyFlags& f, std::size_t count, const std::string& policy) {
  PolicyId id = parse_policy(policy);
  std::vector<Instance> corpus;
  for (std::size_t k = 0; k < count; ++k) corpus.push_back(generate(f.spec(g.seed + k)));
  std::vector<Ratio> ratios(count);
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::optional<Error> failure;
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < count;) {
      try {
        ratios[k] = competitive_ratio(corpus[k], id, g.method(), {g.cap, 1});
      } catch (const Error& e) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!failure) failure = e;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::max(1u, g.jobs); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) throw *failure;

  std::size_t worst = 0;
  std::cout << "instance,seed,ratio,ratio_decimal\n";
  for (std::size_t k = 0; k < count; ++k) {
    if (ratios[k] > ratios[worst]) worst = k;
    std::cout << k << ',' << g.seed + k << ',' << ratios[k] << ',' << ratios[k].decimal(12) << '\n';
  }
  std::cout << "max," << g.seed + worst << ',' << ratios[worst] << ',' << ratios[worst].decimal(12) << '\n';
  auto ceiling = ratio_ceiling(id);
  if (ceiling && ratios[worst] > *ceiling) {
    std::cerr << "violation: max ratio " << ratios[worst] << " exceeds " << *ceiling << " for " << policy << "\n";
    return kViolation;
  }
  return kOk;
}

// ---------------------------------------------------------------- check

std::vector<fs::path> corpus_files(const std::string& dir) {
  std::vector<fs::path> files;
  if (!fs::is_directory(dir)) throw Error(ErrorCode::IoError, "corpus " + dir + " is not a directory");
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  return files;
}

int cmd_check(const Globals& g, const std::string& suite, const std::string& corpus, const std::string& policy) {
  std::optional<PolicyId> pid;
  if (!policy.empty()) pid = parse_policy(policy);
  auto files = corpus_files(corpus);
  io::json results = io::json::array();
  std::size_t failed = 0, skipped_updates = 0;
  std::optional<Ratio> max_ratio;

  for (const auto& file : files) {
    Instance inst = io::read_instance(file);
    std::string id = io::instance_id(inst);
    std::vector<CheckReport> reports;
    auto policies = pid ? std::vector<PolicyId>{*pid}
                        : std::vector<PolicyId>(kAllPolicies.begin(), kAllPolicies.end());
    if (suite == "lemma2" || suite == "decomposition") {
      for (auto p : policies) {
        Trace t = simulate(inst, p);
        t.instance_id = id;
        reports.push_back(suite == "lemma2" ? check_lemma2(t, inst) : check_decomposition(t, inst));
        reports.back().check_id += ":" + std::string(policy_name(p));
      }
    } else if (suite == "lemma4") {
      reports.push_back(check_lemma4(inst, g.oracle_options()));
    } else if (suite == "lemma5") {
      OracleOptions opts = g.oracle_options();
      reports.push_back(check_lemma5(inst, inst.size() <= g.cap ? &opts : nullptr));
    } else {  // cr
      for (auto p : pid ? policies : std::vector<PolicyId>{PolicyId::SrptPlus, PolicyId::SrptL}) {
        Ratio r = competitive_ratio(inst, p, g.method(), g.oracle_options());
        CheckReport rep{"cr:" + std::string(policy_name(p)), id, true, {}, {}};
        if (auto c = ratio_ceiling(p); c && r > *c) rep.fail(0, r, *c, "ratio above theorem constant");
        if (!max_ratio || r > *max_ratio) max_ratio = r;
        reports.push_back(rep);
      }
    }
    for (auto& rep : reports) {
      rep.instance_id = id;
      skipped_updates += rep.skipped.size();
      io::json row{{"file", file.filename().string()}, {"check", rep.check_id}, {"passed", rep.passed}};
      io::json witnesses = io::json::array();
      for (const auto& w : rep.witnesses)
        witnesses.push_back({{"update", w.update}, {"lhs", w.lhs.str()}, {"rhs", w.rhs.str()}, {"note", w.note}});
      row["witnesses"] = witnesses;
      row["skipped"] = rep.skipped;
      results.push_back(row);
      if (!rep.passed) {
        ++failed;
        std::cerr << "FAIL " << rep.check_id << " " << file.filename().string();
        for (const auto& w : rep.witnesses) std::cerr << " [i=" << w.update << " " << w.lhs << " vs " << w.rhs << "]";
        std::cerr << "\n";
      }
    }
  }

  io::json summary{{"suite", suite}, {"corpus", corpus}, {"instances", files.size()},
                   {"checks", results.size()}, {"failed", failed}, {"skipped_updates", skipped_updates}};
  if (max_ratio) summary["max_ratio"] = max_ratio->str();
  summary["results"] = results;
  io::write_file(fs::path(g.out) / ("check-" + suite + ".json"), summary.dump(2) + "\n");

  std::cout << suite << ": " << files.size() << " instances, " << results.size() << " checks, " << failed
            << " failed, " << skipped_updates << " skipped updates";
  if (max_ratio) std::cout << ", max ratio " << max_ratio->str() << " (" << max_ratio->decimal(8) << ")";
  std::cout << "\n";
  return failed == 0 ? kOk : kViolation;
}

// ---------------------------------------------------------------- search

int cmd_search(const Globals& g, const std::string& policy, std::size_t n, std::uint64_t budget) {
  PolicyId id = parse_policy(policy);
  SearchOptions opts;
  opts.method = g.method();
  opts.oracle = {g.cap, 1};
  auto res = adversarial_search(id, n, budget, g.seed, opts);
  fs::path file = fs::path(g.out) / ("search-" + policy + "-seed" + std::to_string(g.seed) + ".json");
  io::write_file(file, io::format_instance(res.instance));
  std::cout << "policy      " << policy << "\n"
            << "ratio       " << res.ratio << " (" << res.ratio.decimal(12) << ")\n"
            << "evaluations " << res.evaluations << "\n"
            << "accepted    " << res.accepted << "\n"
            << "instance    " << file.string() << "\n";
  auto ceiling = ratio_ceiling(id);
  return ceiling && res.ratio > *ceiling ? kViolation : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"aoilab: exact age-of-information scheduling lab"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--out", g.out, "output directory")->capture_default_str();
  app.add_option("--seed", g.seed, "base random seed")->capture_default_str();
  app.add_option("--cap", g.cap, "largest instance the enumeration oracle accepts")->capture_default_str();
  app.add_option("--jobs", g.jobs, "worker threads")->capture_default_str();
  app.add_option("--oracle", g.oracle, "offline solver: auto | enumerate | frontier")
      ->check(CLI::IsMember({"auto", "enumerate", "frontier"}))
      ->capture_default_str();

  const std::string policy_help = "policy id (" + policy_names() + ")";

  FamilyFlags gen_flags;
  std::string gen_file;
  std::size_t gen_count = 1;
  auto* gen = app.add_subcommand("gen", "write a generated instance");
  gen_flags.add(*gen);
  gen->add_option("-o,--output", gen_file, "instance file (stdout when omitted)");
  gen->add_option("--count", gen_count, "write this many instances (seeds seed..seed+count-1) into --out");

  std::string run_path, run_policy;
  auto* run = app.add_subcommand("run", "simulate one policy (or the oracle) on an instance");
  run->add_option("instance", run_path, "instance file")->required();
  run->add_option("--policy", run_policy, policy_help + " or oracle")->required();

  std::string cmp_path;
  std::vector<std::string> cmp_policies;
  auto* cmp = app.add_subcommand("compare", "tabulate several policies against the oracle");
  cmp->add_option("instance", cmp_path, "instance file")->required();
  cmp->add_option("--policies", cmp_policies, "policy ids or oracle (default: all)")->delimiter(',');

  FamilyFlags sweep_flags;
  std::size_t sweep_count = 100;
  std::string sweep_policy;
  auto* sweep = app.add_subcommand("sweep", "competitive ratios over a generated corpus");
  sweep_flags.add(*sweep);
  sweep->add_option("--count", sweep_count, "instances")->check(CLI::PositiveNumber);
  sweep->add_option("--policy", sweep_policy, policy_help)->required();

  std::string check_suite, check_corpus, check_policy;
  auto* check = app.add_subcommand("check", "run a lemma or ratio suite over an instance directory");
  check->add_option("--suite", check_suite, "lemma2 | lemma4 | lemma5 | decomposition | cr")
      ->required()
      ->check(CLI::IsMember({"lemma2", "lemma4", "lemma5", "decomposition", "cr"}));
  check->add_option("--corpus", check_corpus, "directory of instance files")->required();
  check->add_option("--policy", check_policy, policy_help);

  std::string search_policy;
  std::size_t search_n = 8;
  std::uint64_t search_budget = 1000;
  auto* search = app.add_subcommand("search", "hill-climb for a high competitive ratio");
  search->add_option("--policy", search_policy, policy_help)->required();
  search->add_option("-n,--n", search_n, "updates per instance");
  search->add_option("--budget", search_budget, "mutation steps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) return cmd_gen(g, gen_flags, gen_file, gen_count);
    if (*run) return cmd_run(g, run_path, run_policy);
    if (*cmp) return cmd_compare(g, cmp_path, cmp_policies);
    if (*sweep) return cmd_sweep(g, sweep_flags, sweep_count, sweep_policy);
    if (*check) return cmd_check(g, check_suite, check_corpus, check_policy);
    if (*search) return cmd_search(g, search_policy, search_n, search_budget);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
