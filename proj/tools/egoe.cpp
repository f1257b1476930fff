// egoe: command-line driver for embedded-ensemble spectra and their analysis.
//
//   egoe generate  --config run.json --out spectra.egoearc
//   egoe decompose --archive spectra.egoearc --orders 2,3,4 --out results/
//   egoe fluct     --archive spectra.egoearc --out results/
//   egoe analytic  --statistics boson -m 20 -N 10 -k 2,3,4,5 --out results/
//   egoe table1    --members 50 --out results/
//
// Exit status: 0 on success, 2 on invalid input, 1 on runtime failure.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "egoe/egoe.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Overrides {
  std::string config;
  std::uint64_t seed = 0;
  int members = 0, m = 0, N = 0, k = 0;
  std::string statistics;
  std::vector<int> orders;
  std::string out;
  std::string archive;
  std::string export_json;
  int threads = 0;

  CLI::Option* seed_opt = nullptr;
  CLI::Option* members_opt = nullptr;
  CLI::Option* m_opt = nullptr;
  CLI::Option* N_opt = nullptr;
  CLI::Option* k_opt = nullptr;
  CLI::Option* statistics_opt = nullptr;
  CLI::Option* orders_opt = nullptr;
  CLI::Option* out_opt = nullptr;
};

bool given(const CLI::Option* o) { return o != nullptr && o->count() > 0; }

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config, "run configuration (JSON)")->check(CLI::ExistingFile);
  app->add_option("--threads", o.threads, "worker threads (default: $EGOE_THREADS, then all cores)")
      ->check(CLI::PositiveNumber);
  o.out_opt = app->add_option("--out", o.out, "output path");
}

void add_ensemble(CLI::App* app, Overrides& o) {
  o.seed_opt = app->add_option("--seed", o.seed, "master seed");
  o.members_opt = app->add_option("--members", o.members, "ensemble members");
  o.statistics_opt = app->add_option("--statistics", o.statistics, "fermion | boson");
  o.m_opt = app->add_option("-m,--particles", o.m, "particle number m");
  o.N_opt = app->add_option("-N,--states", o.N, "single-particle states N");
  o.k_opt = app->add_option("-k,--body-rank", o.k, "interaction body rank k");
}

void add_orders(CLI::App* app, Overrides& o) {
  o.orders_opt = app->add_option("--orders", o.orders, "correction orders n0, e.g. 2,3,4")->delimiter(',');
}

egoe::RunConfig resolve_config(const Overrides& o) {
  egoe::RunConfig c = o.config.empty() ? egoe::RunConfig{} : egoe::load_run_config(o.config);
  if (given(o.seed_opt)) c.ensemble.master_seed = o.seed;
  if (given(o.members_opt)) c.ensemble.members = o.members;
  if (given(o.statistics_opt)) c.ensemble.statistics = egoe::parse_statistics(o.statistics);
  if (given(o.m_opt)) c.ensemble.m = o.m;
  if (given(o.N_opt)) c.ensemble.N = o.N;
  if (given(o.k_opt)) c.ensemble.k = o.k;
  if (given(o.orders_opt)) c.orders = o.orders;
  c.validate();
  return c;
}

fs::path output_dir(const Overrides& o, const egoe::RunConfig& c) {
  fs::path dir = given(o.out_opt) ? fs::path(o.out) : fs::path(c.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw egoe::IoError("cannot create directory '" + dir.string() + "': " + ec.message());
  return dir;
}

json document(const egoe::RunConfig& c) {
  return json{{"format_version", std::string(egoe::kRunFormatVersion)}, {"config", egoe::to_json(c)}};
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw egoe::IoError("cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw egoe::IoError("write failed for '" + path.string() + "'");
}

egoe::SpectrumArchive load_archive(const Overrides& o, egoe::RunConfig& c) {
  auto archive = egoe::read_archive_file(o.archive);
  c.ensemble = archive.header.spec;
  c.validate();
  return archive;
}

int cmd_generate(const Overrides& o) {
  const auto cfg = resolve_config(o);
  const unsigned threads = egoe::resolve_threads(o.threads);
  const auto spectra = egoe::generate_spectra(cfg.ensemble, threads);
  const auto archive = egoe::make_archive(cfg.ensemble, spectra);

  fs::path path = given(o.out_opt) ? fs::path(o.out) : fs::path(cfg.output_dir) / "spectra.egoearc";
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  egoe::write_archive_file(path, archive);
  if (!o.export_json.empty()) {
    json j = document(cfg);
    j["archive"] = egoe::archive_to_json(archive);
    write_json(o.export_json, j);
  }
  std::cout << "wrote " << path.string() << ": " << archive.records.size() << " members, d = "
            << archive.header.dimension << '\n';
  return 0;
}

int cmd_decompose(const Overrides& o) {
  auto cfg = resolve_config(o);
  const auto archive = load_archive(o, cfg);
  const unsigned threads = egoe::resolve_threads(o.threads);
  const auto spectra = archive.spectra();
  const auto decs = egoe::decompose_ensemble(spectra, cfg.orders, threads);
  const fs::path dir = output_dir(o, cfg);

  egoe::CsvWriter motion(dir / "level_motion.csv", {"member", "order", "E_hat", "delta"});
  egoe::CsvWriter rms(dir / "delta_rms.csv", {"member", "order", "q", "delta_rms"});
  json members = json::array();
  std::vector<std::vector<double>> by_order(cfg.orders.size());
  for (std::size_t i = 0; i < decs.size(); ++i) {
    const auto& d = decs[i];
    const auto member = static_cast<long long>(spectra[i].member);
    json mj{{"member", member},
            {"seed", spectra[i].seed},
            {"q", d.moments.q_est},
            {"centroid", d.moments.centroid},
            {"width", d.moments.width()},
            {"gamma1", d.moments.gamma1},
            {"gamma2", d.moments.gamma2}};
    json fits = json::array();
    for (std::size_t o_i = 0; o_i < cfg.orders.size(); ++o_i) {
      const auto& s = d.series[o_i];
      for (std::size_t j = 0; j < s.size(); ++j) {
        motion.row({member, static_cast<long long>(s.order), s.e_hat[j], s.delta[j]});
      }
      rms.row({member, static_cast<long long>(s.order), d.moments.q_est, s.rms});
      by_order[o_i].push_back(s.rms);
      fits.push_back({{"order", s.order},
                      {"coefficients", d.models[o_i].coefficients},
                      {"delta_rms", s.rms},
                      {"window", {s.window_begin, s.window_end}}});
    }
    mj["fits"] = std::move(fits);
    members.push_back(std::move(mj));
  }

  json summary = document(cfg);
  summary["goe_delta_rms"] = egoe::goe_delta_rms(static_cast<double>(archive.header.dimension));
  summary["delta_rms_window"] = "full spectrum";
  json per_order = json::array();
  for (std::size_t o_i = 0; o_i < cfg.orders.size(); ++o_i) {
    const auto mw = egoe::mean_with_error(by_order[o_i]);
    per_order.push_back({{"order", cfg.orders[o_i]}, {"mean_delta_rms", mw.mean}, {"standard_error", mw.standard_error}});
  }
  summary["orders"] = std::move(per_order);
  summary["members"] = std::move(members);
  write_json(dir / "decompose_summary.json", summary);
  std::cout << "wrote level_motion.csv, delta_rms.csv, decompose_summary.json to " << dir.string() << '\n';
  return 0;
}

int cmd_fluct(const Overrides& o) {
  auto cfg = resolve_config(o);
  const auto archive = load_archive(o, cfg);
  const unsigned threads = egoe::resolve_threads(o.threads);
  const auto spectra = archive.spectra();
  const fs::path dir = output_dir(o, cfg);
  const auto& spec = cfg.ensemble;

  // Periodograms of the level motion at each requested order.
  const auto decs = egoe::decompose_ensemble(spectra, cfg.orders, threads);
  const egoe::LombScargleOptions ls{cfg.oversample, 1.0};
  std::vector<egoe::SeparationInput> inputs;
  for (int order : cfg.orders) inputs.push_back({spec.k, order, {}});
  for (auto& in : inputs) in.members.resize(decs.size());
  egoe::parallel_for(decs.size(), threads, [&](std::size_t i) {
    for (std::size_t o_i = 0; o_i < inputs.size(); ++o_i) {
      inputs[o_i].members[i] = egoe::level_motion_periodogram(decs[i].series[o_i], cfg.trim, ls);
    }
  });
  {
    egoe::CsvWriter curves(dir / "periodogram.csv", {"member", "order", "frequency", "power"});
    egoe::CsvWriter peaks(dir / "periodogram_peaks.csv",
                          {"member", "order", "peak_frequency", "peak_power", "significance", "samples"});
    for (const auto& in : inputs) {
      for (std::size_t i = 0; i < in.members.size(); ++i) {
        const auto& p = in.members[i];
        const auto member = static_cast<long long>(spectra[i].member);
        for (std::size_t f = 0; f < p.frequency.size(); ++f) {
          curves.row({member, static_cast<long long>(in.order), p.frequency[f], p.power[f]});
        }
        peaks.row({member, static_cast<long long>(in.order), p.peak_frequency, p.peak_power, p.significance,
                   static_cast<long long>(p.samples)});
      }
    }
  }
  const auto report = egoe::separation_report(inputs);
  {
    egoe::CsvWriter table(dir / "periodogram_summary.csv",
                          {"k", "order", "mean_significance", "mean_peak_frequency", "members"});
    for (const auto& r : report) {
      table.row({static_cast<long long>(r.k), static_cast<long long>(r.order), r.mean_significance,
                 r.mean_peak_frequency, static_cast<long long>(r.members)});
    }
  }

  // Unfolded fluctuation measures.
  const int unfold_order = egoe::unfolding_order(spec.statistics, spec.k);
  const auto unfolded = egoe::unfold_ensemble(spectra, unfold_order, cfg.trim, threads);
  const auto hist = egoe::nnsd(unfolded, cfg.histogram_bin, cfg.histogram_max);
  {
    egoe::CsvWriter csv(dir / "nnsd.csv", {"s_low", "s_high", "density", "wigner", "poisson"});
    for (std::size_t b = 0; b < hist.density.size(); ++b) {
      csv.row({hist.edges[b], hist.edges[b + 1], hist.density[b], hist.wigner[b], hist.poisson[b]});
    }
  }
  const auto d3 = egoe::delta3(unfolded, cfg.l_max, 2.0, 2.0);
  {
    egoe::CsvWriter csv(dir / "delta3.csv", {"L", "delta3", "goe", "poisson"});
    for (std::size_t i = 0; i < d3.L.size(); ++i) csv.row({d3.L[i], d3.delta3[i], d3.goe[i], d3.poisson[i]});
  }

  json summary = document(cfg);
  summary["significance_convention"] =
      "Lambda = 100 (1 - FAP), FAP = 1 - (1 - exp(-P_max))^M, M = number of samples";
  json sep = json::array();
  for (const auto& r : report) {
    sep.push_back({{"k", r.k}, {"order", r.order}, {"mean_significance", r.mean_significance},
                   {"mean_peak_frequency", r.mean_peak_frequency}});
  }
  summary["periodogram"] = std::move(sep);
  summary["unfolding_order"] = unfold_order;
  summary["nnsd"] = {{"variance", hist.variance},      {"mean", hist.mean},
                     {"spacings", hist.count},         {"l1_wigner", hist.l1_wigner},
                     {"l1_poisson", hist.l1_poisson},  {"wigner_variance", 4.0 / std::numbers::pi - 1.0}};
  summary["delta3"] = {{"L_max", d3.L.back()}, {"value_at_L_max", d3.delta3.back()}, {"goe_at_L_max", d3.goe.back()}};
  write_json(dir / "fluct_summary.json", summary);
  std::cout << "wrote periodogram, nnsd and delta3 tables to " << dir.string() << '\n';
  return 0;
}

struct AnalyticOptions {
  std::string statistics = "fermion";
  int m = 10, N = 20;
  std::vector<int> ks{2, 3, 4, 5};
  std::vector<int> modes{2, 3, 4, 6};
  double q = -1.0;
  double scale = 1.0;
  int points = 401;
  std::string out = ".";
};

int cmd_analytic(const AnalyticOptions& a) {
  const auto stat = egoe::parse_statistics(a.statistics);
  if (a.points < 3) throw egoe::DomainError("analytic: need at least 3 grid points");
  std::vector<std::pair<int, double>> curves;  // (k, q)
  for (int k : a.ks) {
    if (a.q >= 0.0) {
      curves.emplace_back(k, a.q);
    } else if (auto p = egoe::find_preset(stat, k); p && p->m == a.m && p->N == a.N) {
      curves.emplace_back(k, p->q);
    } else {
      throw egoe::DomainError("analytic: no q preset for " + std::string(egoe::to_string(stat)) + " m=" +
                              std::to_string(a.m) + " N=" + std::to_string(a.N) + " k=" + std::to_string(k) +
                              "; pass --q");
    }
  }
  double half = 0.0;
  for (const auto& [k, q] : curves) {
    const double edge = egoe::support_edge(q);
    half = std::max(half, std::isfinite(edge) ? edge : 6.0);
  }
  std::vector<double> grid(static_cast<std::size_t>(a.points));
  for (int i = 0; i < a.points; ++i) grid[static_cast<std::size_t>(i)] = -half + 2.0 * half * i / (a.points - 1);

  std::error_code ec;
  fs::create_directories(a.out, ec);
  if (ec) throw egoe::IoError("cannot create directory '" + a.out + "': " + ec.message());
  const fs::path path = fs::path(a.out) / "analytic_modes.csv";
  egoe::CsvWriter csv(path, {"statistics", "m", "N", "k", "q", "n", "scale", "E_hat", "scaled_width"});
  for (const auto& [k, q] : curves) {
    for (int n : a.modes) {
      const auto c = egoe::mode_width_curve(stat, a.m, a.N, k, q, n, grid, a.scale);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        csv.row({std::string(egoe::to_string(stat)), static_cast<long long>(a.m), static_cast<long long>(a.N),
                 static_cast<long long>(k), q, static_cast<long long>(n), a.scale, grid[i], c.values[i]});
      }
    }
  }
  std::cout << "wrote " << path.string() << '\n';
  return 0;
}

int cmd_table1(const Overrides& o, const std::string& only) {
  auto cfg = resolve_config(o);
  const unsigned threads = egoe::resolve_threads(o.threads);
  const fs::path dir = output_dir(o, cfg);
  struct System {
    egoe::Statistics stat;
    int m, N, k_max;
  };
  std::vector<System> systems{{egoe::Statistics::Fermion, 6, 12, 6}, {egoe::Statistics::Boson, 10, 5, 10}};
  if (!only.empty()) {
    const auto s = egoe::parse_statistics(only);
    std::erase_if(systems, [&](const System& x) { return x.stat != s; });
  }

  egoe::CsvWriter csv(dir / "table1.csv",
                      {"statistics", "m", "N", "k", "members", "dimension", "gamma1", "gamma1_se", "gamma2",
                       "gamma2_se", "variance", "variance_se", "q", "q_se"});
  json rows = json::array();
  for (const auto& sys : systems) {
    for (int k = 2; k <= sys.k_max; ++k) {
      egoe::EnsembleSpec spec = cfg.ensemble;
      spec.statistics = sys.stat;
      spec.m = sys.m;
      spec.N = sys.N;
      spec.k = k;
      spec.validate();
      const auto spectra = egoe::generate_spectra(spec, threads);
      std::vector<egoe::SpectralMoments> ms;
      for (const auto& s : spectra) ms.push_back(egoe::moments(s));
      const auto sum = egoe::summarize_moments(ms);
      const auto stat = std::string(egoe::to_string(sys.stat));
      const auto d = static_cast<long long>(spec.m_dimension());
      csv.row({stat, static_cast<long long>(sys.m), static_cast<long long>(sys.N), static_cast<long long>(k),
               static_cast<long long>(spec.members), d, sum.gamma1.mean, sum.gamma1.standard_error,
               sum.gamma2.mean, sum.gamma2.standard_error, sum.variance.mean, sum.variance.standard_error,
               sum.q_est.mean, sum.q_est.standard_error});
      rows.push_back({{"statistics", stat}, {"m", sys.m}, {"N", sys.N}, {"k", k}, {"members", spec.members},
                      {"dimension", d}, {"gamma1", sum.gamma1.mean}, {"gamma1_se", sum.gamma1.standard_error},
                      {"gamma2", sum.gamma2.mean}, {"gamma2_se", sum.gamma2.standard_error},
                      {"variance", sum.variance.mean}, {"variance_se", sum.variance.standard_error},
                      {"q", sum.q_est.mean}, {"q_se", sum.q_est.standard_error}});
      std::cout << stat << " m=" << sys.m << " N=" << sys.N << " k=" << k << "  gamma1 = " << sum.gamma1.mean
                << "  gamma2 = " << sum.gamma2.mean << '\n';
    }
  }
  json j = document(cfg);
  j["rows"] = std::move(rows);
  write_json(dir / "table1.json", j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Embedded random-matrix ensembles: spectra, normal-mode decomposition, fluctuation measures"};
  app.require_subcommand(1);

  Overrides gen, dec, flu, tab;
  auto* generate = app.add_subcommand("generate", "sample, embed and diagonalize an ensemble; write an archive");
  add_common(generate, gen);
  add_ensemble(generate, gen);
  generate->add_option("--export-json", gen.export_json, "also write a human-readable JSON dump");

  auto* decompose = app.add_subcommand("decompose", "fit smooth densities and export the level motion");
  add_common(decompose, dec);
  add_orders(decompose, dec);
  decompose->add_option("--archive", dec.archive, "spectrum archive")->required()->check(CLI::ExistingFile);

  auto* fluct = app.add_subcommand("fluct", "periodograms, spacing distribution and Delta3");
  add_common(fluct, flu);
  add_orders(fluct, flu);
  fluct->add_option("--archive", flu.archive, "spectrum archive")->required()->check(CLI::ExistingFile);

  AnalyticOptions an;
  auto* analytic = app.add_subcommand("analytic", "closed-form mode-width curves over a normalized-energy grid");
  analytic->add_option("--statistics", an.statistics, "fermion | boson")->capture_default_str();
  analytic->add_option("-m,--particles", an.m, "particle number m")->capture_default_str();
  analytic->add_option("-N,--states", an.N, "single-particle states N")->capture_default_str();
  analytic->add_option("-k,--body-rank", an.ks, "body ranks (q taken from presets unless --q)")->delimiter(',');
  analytic->add_option("--modes", an.modes, "mode indices n >= 2")->delimiter(',');
  analytic->add_option("--q", an.q, "explicit q in [0,1] for every k")->check(CLI::Range(0.0, 1.0));
  analytic->add_option("--scale", an.scale, "overall scale of the curves")->capture_default_str();
  analytic->add_option("--points", an.points, "grid points")->capture_default_str();
  analytic->add_option("--out", an.out, "output directory")->capture_default_str();

  std::string only;
  auto* table1 = app.add_subcommand("table1", "skewness and excess of both reference systems for every k");
  add_common(table1, tab);
  add_ensemble(table1, tab);
  table1->add_option("--only", only, "restrict to fermion | boson");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*generate) return cmd_generate(gen);
    if (*decompose) return cmd_decompose(dec);
    if (*fluct) return cmd_fluct(flu);
    if (*analytic) return cmd_analytic(an);
    if (*table1) return cmd_table1(tab, only);
  } catch (const egoe::DomainError& e) {
    std::cerr << "egoe: invalid input: " << e.what() << '\n';
    return 2;
  } catch (const egoe::CapacityError& e) {
    std::cerr << "egoe: invalid input: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "egoe: error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
