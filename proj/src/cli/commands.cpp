#include "ccgm/cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <random>

#include "ccgm/cli/run_config.hpp"
#include "ccgm/data/copula.hpp"
#include "ccgm/data/csv.hpp"
#include "ccgm/data/normalize.hpp"
#include "ccgm/data/pendulum.hpp"
#include "ccgm/data/svg.hpp"
#include "ccgm/error.hpp"
#include "ccgm/est/ate.hpp"
#include "ccgm/est/bootstrap.hpp"
#include "ccgm/est/report.hpp"
#include "ccgm/model/checkpoint.hpp"
#include "ccgm/model/generate.hpp"
#include "ccgm/model/training.hpp"

namespace ccgm::cli {

namespace fs = std::filesystem;
using data::format_double;
using diff::Matrix;

namespace {

// Doubles are echoed into the resolved config with full precision.
CLI::Option* add_real(CLI::App& app, const std::string& flag, double& v, const std::string& help) {
  return app.add_option(flag, v, help)->default_str(format_double(v));
}

// Repeatable list flags. An unset list is written to the config as "" and
// reads back as one blank entry, which the parsers skip.
CLI::Option* add_list(CLI::App& app, const std::string& flag, std::vector<std::string>& v, const std::string& help) {
  return app.add_option(flag, v, help)->default_str("")->take_all();
}

std::vector<std::string> non_blank(const std::vector<std::string>& v) {
  std::vector<std::string> out;
  for (const auto& s : v)
    if (!s.empty()) out.push_back(s);
  return out;
}

fs::path sibling(const fs::path& out, const std::string& suffix) {
  auto p = out;
  return p.replace_extension(suffix);
}

struct Context {
  std::ostream& out;
  std::ostream& err;
  std::string resolved;  // config text of this run
};

void write_config(const Context& ctx, const fs::path& path) { data::write_text_file(path, ctx.resolved); }

// CSV plus its role sidecar, if any.
struct LoadedTable {
  data::DataTable table;
  data::TableSchema schema;
  bool has_schema = false;
};

LoadedTable load_table(const fs::path& path) {
  LoadedTable l;
  l.table = data::read_csv(path);
  l.has_schema = data::read_schema(path, l.schema);
  if (l.has_schema) {
    if (l.schema.columns != l.table.column_names()) {
      throw UsageError(data::schema_path(path).string() + ": columns do not match " + path.string());
    }
    for (std::size_t c = 0; c < l.schema.roles.size(); ++c) l.table.set_role(c, l.schema.roles[c]);
  }
  return l;
}

void write_table(const data::DataTable& t, const fs::path& path, const std::vector<bool>& exogenous,
                 const std::vector<scm::ConceptRange>& ranges) {
  data::write_csv(t, path);
  data::write_schema({t.column_names(), t.roles(), exogenous, ranges, t.provenance()}, path);
}

// ----------------------------------------------------------------------------

struct GenPendulum {
  std::string grid_theta, grid_sun, out;
  std::uint64_t seed = 0;

  void configure(CLI::App& app) {
    const data::PendulumGrid d;
    grid_theta = format_grid({d.theta.min, d.theta.max, d.theta.count});
    grid_sun = format_grid({d.x_sun.min, d.x_sun.max, d.x_sun.count});
    app.add_option("--grid-theta", grid_theta, "pendulum angle grid a:b:k (radians)");
    app.add_option("--grid-sun", grid_sun, "sun position grid a:b:k");
    app.add_option("--out", out, "output CSV")->required();
    app.add_option("--seed", seed, "recorded in the provenance; the grid is deterministic");
  }

  void execute(Context& ctx) {
    const auto gt = parse_grid(grid_theta, "--grid-theta");
    const auto gs = parse_grid(grid_sun, "--grid-sun");
    data::PendulumGrid grid{{gt.min, gt.max, gt.count}, {gs.min, gs.max, gs.count}};
    const auto t = data::generate_pendulum(grid, seed);
    write_table(t, out, data::pendulum_exogenous(), {});
    write_config(ctx, config_path_for_file(out));
    ctx.out << "wrote " << t.rows() << " rows to " << out << "\n";
  }
};

struct GenTabular {
  std::string corr = "table-i", out;
  std::size_t n = 10391;
  std::uint64_t seed = 0;

  void configure(CLI::App& app) {
    app.add_option("--corr", corr, "'table-i' or a JSON copula spec file");
    app.add_option("--n", n, "rows");
    app.add_option("--out", out, "output CSV")->required();
    app.add_option("--seed", seed);
  }

  void execute(Context& ctx) {
    if (n == 0) throw UsageError("--n must be positive");
    data::CopulaSpec spec;
    if (corr == "table-i") {
      spec = data::mindset_spec(n, seed);
    } else {
      nlohmann::json j;
      const auto text = data::read_text_file(corr);
      try {
        j = nlohmann::json::parse(text);
      } catch (const nlohmann::json::parse_error& e) {
        throw UsageError(corr + ": " + e.what());
      }
      spec = data::copula_from_json(j, n, seed);
    }
    const auto t = data::simulate_copula(spec);
    write_table(t, out, spec.exogenous, {});
    write_config(ctx, config_path_for_file(out));
    ctx.out << "wrote " << t.rows() << " rows to " << out << "\n";
  }
};

struct Train {
  std::string data_path, out, exogenous;
  double threshold = 0.1;
  model::TrainConfig cfg;

  void configure(CLI::App& app) {
    app.add_option("--data", data_path, "training CSV (roles and exogenous flags from its sidecar)")->required();
    app.add_option("--out", out, "model checkpoint (JSON)")->required();
    app.add_option("--exogenous", exogenous, "comma-separated exogenous concepts; overrides the sidecar");
    add_real(app, "--threshold", threshold, "report edges with |G| above this");
    app.add_option("--pretrain-epochs", cfg.pretrain_epochs);
    app.add_option("--main-epochs", cfg.main_epochs);
    app.add_option("--batch-size", cfg.batch_size);
    add_real(app, "--pretrain-lr", cfg.pretrain_lr, "");
    add_real(app, "--learning-rate", cfg.learning_rate, "");
    app.add_option("--g-warmup-epochs", cfg.g_warmup_epochs, "main epochs with G frozen");
    add_real(app, "--w-elbo", cfg.w_elbo, "");
    add_real(app, "--w-u", cfg.w_u, "");
    add_real(app, "--w-z", cfg.w_z, "");
    add_real(app, "--w-klu", cfg.w_klu, "");
    add_real(app, "--lambda0", cfg.lambda0, "");
    add_real(app, "--c0", cfg.c0, "");
    add_real(app, "--eta", cfg.scheduler.eta, "penalty growth factor");
    add_real(app, "--gamma", cfg.scheduler.gamma, "required H shrink per epoch");
    add_real(app, "--dag-tolerance", cfg.scheduler.tolerance, "");
    add_real(app, "--c-max", cfg.scheduler.c_max, "");
    add_real(app, "--recon-sigma", cfg.recon_sigma, "");
    app.add_option("--hidden-width", cfg.hidden_width);
    app.add_option("--mask-width", cfg.mask_width);
    add_real(app, "--mask-init-scale", cfg.mask_init_scale, "");
    app.add_option("--seed", cfg.seed);
  }

  void execute(Context& ctx) {
    cfg.validate();
    if (!(threshold >= 0.0)) throw UsageError("--threshold must be non-negative");
    auto loaded = load_table(data_path);
    const auto& t = loaded.table;

    std::vector<bool> exo;
    if (!exogenous.empty()) {
      exo.assign(t.cols(), false);
      for (const auto& name : split_list(exogenous)) exo.at(t.column_index(name)) = true;
    } else if (loaded.has_schema && !loaded.schema.exogenous.empty()) {
      exo = loaded.schema.exogenous;
    } else {
      throw UsageError("no exogenous flags for " + data_path + ": pass --exogenous or provide a sidecar");
    }
    const auto registry = data::make_registry(t, exo, loaded.has_schema ? loaded.schema.ranges : std::vector<scm::ConceptRange>{});
    const auto labels = data::normalize_labels(t, registry);
    if (labels.clipped > 0) ctx.err << "warning: " << labels.clipped << " values clipped into the concept ranges\n";

    const std::size_t every = std::max<std::size_t>(1, cfg.main_epochs / 10);
    auto progress = [&](const char* phase, const model::EpochMetrics& m, const model::CcgmModel&) {
      const bool main = std::string_view(phase) == "train";
      if (main && m.epoch % every != 0 && m.epoch + 1 != cfg.main_epochs) return;
      char line[200];
      std::snprintf(line, sizeof line, "%-8s epoch %4zu  loss %.5g  H %.3g  c %g\n", phase, m.epoch, m.loss_total, m.h, m.c);
      ctx.out << line;
    };
    const auto r = model::train(labels.values, registry, t.roles(), cfg, progress);

    model::save_model(r.model, out);
    data::write_text_file(sibling(out, ".metrics.csv"), model::format_metrics_csv(r.metrics));
    data::write_text_file(sibling(out, ".pretrain_metrics.csv"), model::format_metrics_csv(r.pretrain_metrics));
    data::write_text_file(sibling(out, ".adjacency.json"),
                          scm::adjacency_to_json(r.model.adjacency, registry.names()).dump(2) + "\n");
    write_config(ctx, config_path_for_file(out));

    char h[64];
    std::snprintf(h, sizeof h, "%.3e", r.final_h);
    ctx.out << "final H(G) = " << h << (r.acyclic ? " (acyclic)" : " (not below tolerance)") << "\n";
    ctx.out << "edges |G| > " << threshold << ": "
            << scm::format_edges(scm::threshold_adjacency(r.model.adjacency, threshold), registry) << "\n";
  }
};

// Scene for rendering a decoded pendulum row, clamped into the drawable range.
data::PendulumScene scene_from_row(std::span<const double> row) {
  using C = data::PendulumConstants;
  data::PendulumScene s;
  s.theta = std::clamp(row[0], -C::theta_max, C::theta_max);
  s.x_sun = std::clamp(row[1], -C::sun_max, C::sun_max);
  s.w_shadow = std::clamp(row[2], 0.0, 10.0);
  s.x_shadow = std::clamp(row[3], -10.0, 10.0);
  return s;
}

struct Intervene {
  std::string model_path, data_path, base = "row", out;
  std::vector<std::string> clamps, removals, sweep;
  std::size_t row = 0;
  std::uint64_t seed = 0;

  void configure(CLI::App& app) {
    app.add_option("--model", model_path, "trained checkpoint")->required();
    app.add_option("--data", data_path, "CSV holding the base row");
    add_list(app, "--do", clamps, "concept=value, latent (normalized) units; repeatable");
    add_list(app, "--remove", removals, "parent:child edge to cut; repeatable");
    app.add_option("--sweep", sweep, "concept a:b:k, latent (normalized) units")->default_str("")->expected(2);
    app.add_option("--base", base, "base sample: 'row' (encode --data row --row) or 'prior'")
        ->check(CLI::IsMember({"row", "prior"}));
    app.add_option("--row", row, "0-based data row used as the base sample");
    app.add_option("--seed", seed, "prior draw for --base prior");
    app.add_option("--out", out, "output directory")->required();
  }

  void execute(Context& ctx) {
    const auto m = model::load_model(model_path);
    const auto spec = parse_intervention(removals, clamps);
    const auto resolved = scm::resolve(spec, m.registry);  // fail early on unknown names
    const bool pendulum = m.registry.names() == data::pendulum_columns();

    Matrix un;
    if (base == "row") {
      if (data_path.empty()) throw UsageError("--base row needs --data");
      un = data::normalize_labels(load_table(data_path).table, m.registry).values;
    }
    fs::create_directories(out);
    const auto sw = non_blank(sweep);
    data::DataTable result;
    if (!sw.empty()) {
      if (sw.size() != 2) throw UsageError("--sweep takes a concept and a:b:k");
      const auto g = parse_grid(sw[1], "--sweep");
      model::SweepOptions opt;
      opt.concept_name = sw[0];
      opt.values = model::linspace(g.min, g.max, g.count);
      opt.spec = spec;
      opt.base = base == "prior" ? model::SweepBase::Prior : model::SweepBase::DatasetRow;
      opt.row = row;
      opt.seed = seed;
      result = model::sweep(m, un, opt);
      data::write_csv(result, fs::path(out) / "sweep.csv");
      const auto normalized = model::sweep_normalized(m, un, opt);
      data::write_csv(data::DataTable::from_matrix(normalized, m.registry.names()), fs::path(out) / "sweep_normalized.csv");
      if (pendulum) {
        for (std::size_t k = 0; k < result.rows(); ++k) {
          char name[32];
          std::snprintf(name, sizeof name, "sweep_%03zu.svg", k);
          data::write_text_file(fs::path(out) / name, data::render_svg(scene_from_row(result.row(k).subspan(1))));
        }
      }
    } else {
      std::vector<double> z;
      if (base == "prior") {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        z.resize(m.size());
        for (double& v : z) v = normal(rng);
      } else {
        if (row >= un.rows()) throw UsageError("--row " + std::to_string(row) + " is outside the data");
        z = m.encode(un.row_span(row)).mean;
      }
      Matrix decoded(1, m.size());
      const auto u = m.generate_from_latent(z, resolved);
      std::copy(u.begin(), u.end(), decoded.row_span(0).begin());
      result = data::denormalize_labels(decoded, m.registry);
      data::write_csv(result, fs::path(out) / "intervened.csv");
      if (pendulum) data::write_text_file(fs::path(out) / "intervened.svg", data::render_svg(scene_from_row(result.row(0))));
    }
    write_config(ctx, config_path_for_dir(out));
    ctx.out << "wrote " << result.rows() << " row(s) to " << out << "\n";
  }
};

struct Estimate {
  std::string data_path, methods = "naive,ipw,aipw", out, treatment, outcome, confounders;
  std::size_t iterations = 100;
  double fraction = 0.3;
  std::uint64_t seed = 0;

  void configure(CLI::App& app) {
    app.add_option("--data", data_path, "CSV with treatment/outcome/confounder roles")->required();
    app.add_option("--methods", methods, "comma-separated subset of naive,ipw,aipw");
    app.add_option("--bootstrap", iterations, "bootstrap resamples (>= 2)");
    app.add_option("--seed", seed);
    app.add_option("--out", out, "report JSON")->required();
    add_real(app, "--treated-fraction", fraction, "top fraction treated when the treatment is a score");
    app.add_option("--treatment", treatment, "treatment column; overrides the sidecar");
    app.add_option("--outcome", outcome, "outcome column; overrides the sidecar");
    app.add_option("--confounders", confounders, "comma-separated confounders; overrides the sidecar");
  }

  void execute(Context& ctx) {
    if (iterations < 2) throw UsageError("--bootstrap needs at least 2 resamples");
    std::vector<est::Method> ms;
    for (const auto& name : split_list(methods)) ms.push_back(est::parse_method(name));
    if (ms.empty()) throw UsageError("--methods is empty");

    auto t = load_table(data_path).table;
    auto assign = [&](const std::string& name, data::ColumnRole role) {
      for (auto c : t.columns_with_role(role)) t.set_role(c, data::ColumnRole::Other);
      t.set_role(t.column_index(name), role);
    };
    if (!treatment.empty()) assign(treatment, data::ColumnRole::Treatment);
    if (!outcome.empty()) assign(outcome, data::ColumnRole::Outcome);
    if (!confounders.empty()) {
      for (auto c : t.columns_with_role(data::ColumnRole::Confounder)) t.set_role(c, data::ColumnRole::Other);
      for (const auto& name : split_list(confounders)) t.set_role(t.column_index(name), data::ColumnRole::Confounder);
    }
    const auto tcol = t.role_column(data::ColumnRole::Treatment);
    const bool binarized = !est::is_binary(t.column(tcol));
    const auto effect = est::extract_effect_data(t, {fraction, false});

    std::vector<est::EffectReport> reports;
    for (auto method : ms) {
      auto fn = [method](const est::EffectData& d) { return est::estimate(method, d); };
      reports.push_back(est::bootstrap(fn, effect, iterations, seed, std::string(est::method_name(method))));
    }

    nlohmann::json j;
    j["rows"] = effect.size();
    j["treated"] = effect.treated();
    j["treatment"] = t.column_name(tcol);
    j["outcome"] = t.column_name(t.role_column(data::ColumnRole::Outcome));
    std::vector<std::string> conf;
    for (auto c : t.columns_with_role(data::ColumnRole::Confounder)) conf.push_back(t.column_name(c));
    j["confounders"] = conf;
    j["binarized"] = binarized;
    j["treated_fraction"] = fraction;
    j["bootstrap"] = iterations;
    j["seed"] = seed;
    j["reports"] = nlohmann::json::array();
    for (const auto& r : reports) j["reports"].push_back(est::report_to_json(r));
    data::write_text_file(out, j.dump(2) + "\n");
    data::write_text_file(sibling(out, ".csv"), est::format_reports_csv(reports));
    data::write_text_file(sibling(out, ".samples.csv"), est::format_samples_csv(reports));
    write_config(ctx, config_path_for_file(out));

    char line[160];
    std::snprintf(line, sizeof line, "%-6s %9s %9s %8s  %s\n", "method", "estimate", "mean", "std", "[.025, .975]");
    ctx.out << line;
    for (const auto& r : reports) {
      std::snprintf(line, sizeof line, "%-6s %9.4f %9.4f %8.4f  [%.4f, %.4f]\n", r.method.c_str(), r.estimate, r.mean,
                    r.std, r.q025, r.q975);
      ctx.out << line;
    }
  }
};

struct Debias {
  std::string model_path, out;
  std::vector<std::string> removals, clamps;
  std::size_t n = 10391;
  std::uint64_t seed = 0;

  void configure(CLI::App& app) {
    app.add_option("--model", model_path, "trained checkpoint")->required();
    add_list(app, "--remove", removals, "parent:child edge to cut; repeatable");
    add_list(app, "--do", clamps, "concept=value clamp, latent units; repeatable");
    app.add_option("--gen", n, "rows to generate from the prior");
    app.add_option("--seed", seed);
    app.add_option("--out", out, "output directory")->required();
  }

  void execute(Context& ctx) {
    if (n == 0) throw UsageError("--gen must be positive");
    const auto m = model::load_model(model_path);
    const auto spec = parse_intervention(removals, clamps);
    for (const auto& [p, c] : spec.edge_removals) {
      const auto pi = m.registry.index_of(p), ci = m.registry.index_of(c);
      if (!m.adjacency.trainable(pi, ci)) throw UsageError("edge " + p + ":" + c + " cannot exist in this model");
    }
    const auto t = model::generate(m, n, seed, spec);
    fs::create_directories(out);
    write_table(t, fs::path(out) / "generated.csv", m.registry.exogenous_flags(), m.registry.ranges());
    write_config(ctx, config_path_for_dir(out));
    ctx.out << "wrote " << t.rows() << " generated rows to " << (fs::path(out) / "generated.csv").string() << "\n";
  }
};

// ----------------------------------------------------------------------------

struct CommandInfo {
  const char* name;
  const char* help;
};

constexpr CommandInfo kCommands[] = {
    {"gen-pendulum", "write the pendulum grid dataset"},
    {"gen-tabular", "simulate a correlation-matched table (Table-I preset or JSON spec)"},
    {"train", "pre-train and train a model on a CSV"},
    {"intervene", "do-interventions, edge removals and sweeps on a trained model"},
    {"estimate", "naive / IPW / AIPW effects with bootstrap"},
    {"debias", "generate a dataset from the prior with edges removed"},
};

void usage(std::ostream& os) {
  os << "usage: ccgm <command> [options]   (ccgm <command> --help for details)\n\ncommands:\n";
  for (const auto& c : kCommands) {
    char line[128];
    std::snprintf(line, sizeof line, "  %-13s %s\n", c.name, c.help);
    os << line;
  }
  os << "\nexit codes: 0 ok, 2 usage, 3 I/O, 4 numeric failure\n";
}

template <class Cmd>
int dispatch(const std::string& name, std::vector<std::string> rest, Context& ctx) {
  CLI::App app("ccgm " + name, "ccgm " + name);
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "flat key=value file; command-line flags override it");
  app.allow_config_extras(CLI::config_extras_mode::error);
  Cmd cmd;
  if constexpr (requires { cmd.seed; }) cmd.seed = default_seed();
  if constexpr (requires { cmd.cfg.seed; }) cmd.cfg.seed = default_seed();
  cmd.configure(app);
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::Success&) {
    ctx.out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    ctx.err << "ccgm " << name << ": " << e.what() << "\n";
    return static_cast<int>(ErrorKind::Usage);
  }
  ctx.resolved = "# ccgm " + name + " (replay: ccgm " + name + " --config <this file>)\n" + app.config_to_str(true, false);
  cmd.execute(ctx);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (args.empty()) {
    usage(err);
    return static_cast<int>(ErrorKind::Usage);
  }
  const std::string& name = args[0];
  if (name == "--help" || name == "-h" || name == "help") {
    usage(out);
    return 0;
  }
  std::vector<std::string> rest(args.begin() + 1, args.end());
  Context ctx{out, err, {}};
  try {
    if (name == "gen-pendulum") return dispatch<GenPendulum>(name, rest, ctx);
    if (name == "gen-tabular") return dispatch<GenTabular>(name, rest, ctx);
    if (name == "train") return dispatch<Train>(name, rest, ctx);
    if (name == "intervene") return dispatch<Intervene>(name, rest, ctx);
    if (name == "estimate") return dispatch<Estimate>(name, rest, ctx);
    if (name == "debias") return dispatch<Debias>(name, rest, ctx);
    err << "ccgm: unknown command '" << name << "'\n";
    usage(err);
    return static_cast<int>(ErrorKind::Usage);
  } catch (const Error& e) {
    err << "ccgm " << name << ": " << e.what() << "\n";
    return static_cast<int>(e.kind());
  } catch (const std::bad_alloc&) {
    err << "ccgm " << name << ": out of memory\n";
    return static_cast<int>(ErrorKind::Numeric);
  } catch (const std::exception& e) {
    err << "ccgm " << name << ": internal error: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::Numeric);
  }
}

}  // namespace ccgm::cli
