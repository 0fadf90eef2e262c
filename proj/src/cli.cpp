#include "deltanet/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "deltanet/encode.hpp"
#include "deltanet/engine.hpp"
#include "deltanet/prelude.hpp"
#include "deltanet/readback.hpp"
#include "deltanet/serialize.hpp"

namespace deltanet {

namespace {

struct RunConfig {
  std::string input;
  std::string calculus = "auto";
  std::uint64_t max_steps = Limits{}.max_steps;
  std::uint64_t max_agents = Limits{}.max_agents;
  bool binary_replicators = false;
  std::optional<std::uint64_t> seed;
  std::string format;
  std::string prelude;
  unsigned workers = 1;
  std::string output_dir = "trace";
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_input(const std::string& arg, std::istream& in) {
  if (arg != "-") return arg;
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool looks_like_json(std::string_view text) {
  const auto pos = text.find_first_not_of(" \t\r\n");
  return pos != std::string_view::npos && text[pos] == '{';
}

Term load_term(const RunConfig& cfg, const std::string& text) {
  Term t = parse_term(text);
  if (cfg.prelude.empty()) return t;
  if (cfg.prelude != "church") throw UsageError("unknown prelude '" + cfg.prelude + "'");
  return apply_prelude(t);
}

Flavor choose_flavor(const RunConfig& cfg, const Term& t) {
  const Calculus least = classify(t);
  if (cfg.calculus == "auto") return least;
  const Flavor f = parse_calculus(cfg.calculus);
  if (!calculus_leq(least, f)) {
    throw FlavorMismatch(f, "term belongs to " + std::string(calculus_name(least)));
  }
  return f;
}

Net load_net(const RunConfig& cfg, const std::string& text) {
  if (looks_like_json(text)) return from_json(text);
  const Term t = load_term(cfg, text);
  return translate(t, choose_flavor(cfg, t), {.fan_tags = true, .binary_replicators = cfg.binary_replicators});
}

EngineOptions engine_options(const RunConfig& cfg) {
  EngineOptions o;
  o.seed = cfg.seed;
  o.binary_replicators = cfg.binary_replicators;
  o.workers = std::max(1u, cfg.workers);
  return o;
}

std::string stats_json(const ReductionStats& stats, Status status) {
  nlohmann::ordered_json j = nlohmann::ordered_json::parse(stats.to_json());
  j["status"] = std::string(status_name(status));
  return j.dump();
}

int cmd_translate(const RunConfig& cfg, std::istream& in, std::ostream& out) {
  const NetFormat format = parse_net_format(cfg.format.empty() ? "json" : cfg.format);
  const Term t = load_term(cfg, read_input(cfg.input, in));
  const Net net = translate(t, choose_flavor(cfg, t), {.fan_tags = true, .binary_replicators = cfg.binary_replicators});
  out << serialize(net, format) << (format == NetFormat::Json ? "\n" : "");
  return kExitOk;
}

int cmd_normalize(const RunConfig& cfg, std::istream& in, std::ostream& out) {
  const std::string format = cfg.format.empty() ? "term" : cfg.format;
  if (format != "term" && format != "json" && format != "dot" && format != "stats") {
    throw FormatError("UnknownFormat: '" + format + "'");
  }
  NormalizeResult r = normalize(load_net(cfg, read_input(cfg.input, in)), {cfg.max_steps, cfg.max_agents},
                                engine_options(cfg));
  if (r.status != Status::Normal || format == "stats") {
    out << stats_json(r.stats, r.status) << "\n";
    return r.status == Status::Normal ? kExitOk : kExitLimit;
  }
  if (format == "term") {
    out << print_term(readback(r.net, {cfg.binary_replicators})) << "\n";
  } else {
    out << serialize(r.net, format) << (format == "json" ? "\n" : "");
  }
  return kExitOk;
}

int cmd_trace(const RunConfig& cfg, std::istream& in, std::ostream& out) {
  const std::string format = cfg.format.empty() ? "trace" : cfg.format;
  if (format != "trace" && format != "dot") throw FormatError("UnknownFormat: '" + format + "'");
  Net net = load_net(cfg, read_input(cfg.input, in));
  EngineOptions options = engine_options(cfg);

  std::filesystem::path dir;
  auto snapshot = [&](const Net& n, std::uint64_t step) {
    std::ostringstream name;
    name << "step-" << std::setw(6) << std::setfill('0') << step << ".dot";
    std::ofstream(dir / name.str()) << to_dot(n, "step" + std::to_string(step));
  };
  if (format == "dot") {
    dir = cfg.output_dir;
    std::filesystem::create_directories(dir);
    snapshot(net, 0);
    options.on_step = [&](const TraceEvent& e) { snapshot(*e.net, e.step); };
  } else {
    options.on_step = [&](const TraceEvent& e) { out << format_trace(e) << "\n"; };
  }
  const NormalizeResult r = normalize(std::move(net), {cfg.max_steps, cfg.max_agents}, options);
  if (format == "dot") out << "wrote " << r.stats.steps + 1 << " snapshots to " << dir.string() << "\n";
  return r.status == Status::Normal ? kExitOk : kExitLimit;
}

int cmd_check(const RunConfig& cfg, std::istream& in, std::ostream& out) {
  std::string text;
  if (cfg.input == "-" || looks_like_json(cfg.input)) {
    text = read_input(cfg.input, in);
  } else {
    std::ifstream file(cfg.input);
    if (!file) throw UsageError("cannot read '" + cfg.input + "'");
    text.assign(std::istreambuf_iterator<char>(file), std::istreambuf_iterator<char>());
  }
  Net net;
  try {
    net = from_json(text);
    net.validate();
  } catch (const NetError& e) {
    out << "structure: FAIL " << errc_name(e.code()) << ": " << e.what() << "\n";
    return kExitInputError;
  }
  out << "structure: ok (" << net.node_count() << " nodes, " << net.live_agents() << " agents)\n";
  const OrientationReport duality = check_parent_child_duality(net);
  out << "duality: " << (duality.consistent ? "ok" : "FAIL " + duality.message) << "\n";
  const std::size_t pairs = active_pairs(net).size();
  out << "active pairs: " << pairs << "\n";
  std::optional<Flavor> flavor;
  if (cfg.calculus != "auto") flavor = parse_calculus(cfg.calculus);
  out << "canonical: " << (is_canonical(net, flavor, cfg.binary_replicators) ? "yes" : "no") << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Translate, reduce and read back λ-terms as interaction nets", "deltanet"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&](CLI::App* sub, bool engine) {
    sub->add_option("input", cfg.input, "term text, net JSON, or - for stdin")->required();
    sub->add_option("--calculus", cfg.calculus, "auto, L, A, I or K")
        ->check(CLI::IsMember({"auto", "L", "A", "I", "K", "l", "a", "i", "k"}));
    sub->add_flag("--binary-replicators", cfg.binary_replicators, "limit replicators to two aux ports");
    sub->add_option("--format", cfg.format, "output format");
    sub->add_option("--prelude", cfg.prelude, "church: predefine numerals and combinators");
    if (engine) {
      sub->add_option("--max-steps", cfg.max_steps, "step limit");
      sub->add_option("--max-agents", cfg.max_agents, "live agent limit");
      sub->add_option("--seed", cfg.seed, "randomize tie-breaking with this seed");
      sub->add_option("--parallel", cfg.workers, "worker threads")->check(CLI::PositiveNumber);
    }
  };
  CLI::App* translate_cmd = app.add_subcommand("translate", "print the net of a term (json or dot)");
  common(translate_cmd, false);
  CLI::App* normalize_cmd = app.add_subcommand("normalize", "reduce to canonical form (term, json, dot or stats)");
  common(normalize_cmd, true);
  CLI::App* trace_cmd = app.add_subcommand("trace", "print one line per reduction step, or DOT snapshots");
  common(trace_cmd, true);
  trace_cmd->add_option("--output-dir", cfg.output_dir, "directory for --format dot snapshots");
  CLI::App* check_cmd = app.add_subcommand("check", "validate a net JSON file");
  check_cmd->add_option("input", cfg.input, "net JSON file, literal JSON, or - for stdin")->required();
  check_cmd->add_option("--calculus", cfg.calculus, "flavor for the canonicality test");
  check_cmd->add_flag("--binary-replicators", cfg.binary_replicators, "accept replicator trees");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (*translate_cmd) return cmd_translate(cfg, in, out);
    if (*normalize_cmd) return cmd_normalize(cfg, in, out);
    if (*trace_cmd) return cmd_trace(cfg, in, out);
    return cmd_check(cfg, in, out);
  } catch (const SyntaxError& e) {
    err << "syntax error at byte " << e.offset() << ": " << e.what() << "\n";
    return kExitInputError;
  } catch (const FlavorMismatch& e) {
    err << e.what() << "\n";
    return kExitFlavorMismatch;
  } catch (const EngineError& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const NotCanonical& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return kExitInputError;
  }
}

}  // namespace deltanet
