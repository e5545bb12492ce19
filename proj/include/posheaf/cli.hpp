#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "posheaf/posheaf.hpp"

namespace posheaf::cli {

inline std::uint64_t env_seed() {
  if (const char* s = std::getenv("POSHEAF_SEED")) return std::strtoull(s, nullptr, 10);
  return 0;
}

struct Options {
  std::string document;
  std::string method = "minimal";
  std::string norm = "none";
  std::string mode = "discrete";
  std::size_t degree = 0;
  std::optional<double> eta;
  std::size_t steps = 100;
  double tol = 1e-10;
  std::string x0_path, layer_path, features_path, signals_path;
  double lr = 0.1;
  std::size_t iters = 200;
  std::size_t d = 1;
};

namespace detail {

inline Json names_of(const Poset& p, const std::vector<Element>& es) {
  Json a = Json::array();
  for (auto e : es) a.push_back(p.name(e));
  return a;
}

template <class Fn>
auto with_exact(const SheafDocument& doc, Fn&& fn) {
  if (const auto* q = std::get_if<Sheaf<Rational>>(&doc.sheaf)) return fn(*q);
  if (const auto* m = std::get_if<Sheaf<ModP>>(&doc.sheaf)) return fn(*m);
  throw Error(ErrorCode::FieldMismatch, "this command needs an exact field (Q or Fp:p), document is R");
}

inline RealComplex real_complex(const SheafDocument& doc, ComplexKind method) {
  if (const auto* r = std::get_if<Sheaf<double>>(&doc.sheaf)) return build_real_complex(*r, method);
  if (const auto* q = std::get_if<Sheaf<Rational>>(&doc.sheaf)) return realize(build_complex(*q, method));
  throw Error(ErrorCode::FieldMismatch, "prime-field documents have no real spectrum");
}

inline Sheaf<double> real_sheaf(const SheafDocument& doc) {
  if (const auto* r = std::get_if<Sheaf<double>>(&doc.sheaf)) return *r;
  if (const auto* q = std::get_if<Sheaf<Rational>>(&doc.sheaf)) return realize(*q);
  throw Error(ErrorCode::FieldMismatch, "prime-field documents cannot be used for real computations");
}

inline Json validate(const SheafDocument& doc) {
  return std::visit(
      [&](const auto& s) {
        using T = typename std::decay_t<decltype(s)>::value_type;
        auto v = check_compositionality(s, ExactScalar<T> ? 0.0 : 1e-12);
        Json out;
        out["compositional"] = v.empty();
        out["violations"] = Json::array();
        double sum = 0.0;
        for (const auto& x : v) {
          out["violations"].push_back({{"lower", s.poset().name(x.lower)},
                                       {"upper", s.poset().name(x.upper)},
                                       {"path1", names_of(s.poset(), x.path1)},
                                       {"path2", names_of(s.poset(), x.path2)},
                                       {"defect", x.defect}});
          sum += x.defect;
        }
        out["defect_sum"] = sum;
        return out;
      },
      doc.sheaf);
}

inline Json classify_report(const SheafDocument& doc) {
  const auto& p = doc.poset();
  auto c = classify(p, doc.field);
  Json out;
  out["graded"] = c.graded;
  out["homology_cell"] = c.homology_cell;
  out["morse_cell"] = c.morse_cell;
  auto by_name = [&](const std::optional<std::vector<int>>& v) {
    if (!v) return Json(nullptr);
    Json o = Json::object();
    for (Element e = 0; e < p.size(); ++e) o[p.name(e)] = (*v)[e];
    return o;
  };
  out["rank"] = by_name(c.rank);
  out["cell_dims"] = by_name(c.cell_dims);
  return out;
}

inline Json sections(const SheafDocument& doc) {
  return with_exact(doc, [](const auto& s) {
    auto sp = global_sections_bruteforce(s);
    Json out;
    out["dim"] = sp.dim();
    out["basis"] = Json::array();
    for (const auto& v : sp.basis) {
      Json row = Json::array();
      for (const auto& x : v) row.push_back(s.field().format(x));
      out["basis"].push_back(row);
    }
    return out;
  });
}

inline Json betti_report(const SheafDocument& doc, ComplexKind method) {
  return with_exact(doc, [&](const auto& s) {
    Json out;
    out["method"] = to_string(method);
    out["betti"] = betti(s, method);
    return out;
  });
}

inline Json incidence_report(const SheafDocument& doc) {
  const auto& p = doc.poset();
  auto dump = [&](const auto& inc) {
    Json out;
    out["generators"] = Json::array();
    for (std::size_t g = 0; g < inc.size(); ++g)
      out["generators"].push_back({{"owner", p.name(inc.generators[g].owner)}, {"degree", inc.generators[g].degree}});
    out["incidence"] = Json::array();
    for (std::size_t g = 0; g < inc.size(); ++g) {
      Json row = Json::array();
      for (std::size_t h = 0; h < inc.size(); ++h) row.push_back(inc.field.format(inc.incidence(g, h)));
      out["incidence"].push_back(row);
    }
    out["augmentation"] = Json::array();
    for (const auto& a : inc.augmentation) out["augmentation"].push_back(inc.field.format(a));
    return out;
  };
  FieldTag tag = doc.field.exact() ? doc.field : FieldTag::rationals();
  if (tag.kind == FieldKind::PrimeField) return dump(minimal_incidence(p, Field<ModP>{tag.prime}));
  return dump(minimal_incidence(p, Field<Rational>{}));
}

inline Json spectrum_report(const SheafDocument& doc, const Options& o) {
  auto method = parse_complex_kind(o.method);
  auto norm = parse_normalization(o.norm);
  auto l = laplacian(real_complex(doc, method), o.degree, norm);
  auto sb = eigendecompose(l, o.tol);
  Json out;
  out["degree"] = o.degree;
  out["method"] = to_string(method);
  out["norm"] = to_string(norm);
  out["eigenvalues"] = sb.eigenvalues;
  out["lambda_min"] = sb.lambda_min;
  out["lambda_max"] = sb.lambda_max;
  out["harmonic_dim"] = sb.harmonic_dim;
  return out;
}

inline RealVector default_x0(std::size_t n) {
  std::mt19937_64 rng(env_seed());
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RealVector x(n);
  for (auto& v : x) v = u(rng);
  return x;
}

inline Json diffuse_report(const SheafDocument& doc, const Options& o, std::vector<std::string>& inputs) {
  auto method = parse_complex_kind(o.method);
  auto norm = parse_normalization(o.norm);
  auto l = laplacian(real_complex(doc, method), o.degree, norm);
  RealVector x0;
  if (!o.x0_path.empty()) {
    inputs.push_back(read_file(o.x0_path));
    x0 = json_real_vector(parse_json_text(inputs.back()), "x0");
  } else {
    x0 = default_x0(l.matrix.rows());
  }
  DiffusionConfig cfg{o.eta, o.steps, parse_diffusion_mode(o.mode)};
  auto tr = heat_diffusion(l, x0, cfg);
  auto sb = eigendecompose(l);
  Json out;
  out["degree"] = o.degree;
  out["method"] = to_string(method);
  out["norm"] = to_string(norm);
  out["mode"] = to_string(tr.mode);
  out["eta"] = tr.eta;
  out["steps"] = o.steps;
  out["initial_state"] = x0;
  out["final_state"] = tr.states.back();
  out["limit"] = tr.limit;
  out["energies"] = tr.energies;
  out["final_distance"] = tr.distances.back();
  out["predicted_rate"] = predicted_rate(tr, sb);
  try {
    out["estimated_rate"] = convergence_rate(tr, sb);
  } catch (const Error&) {
    out["estimated_rate"] = nullptr;
  }
  return out;
}

inline Json nsd_report(const SheafDocument& doc, const Options& o, std::vector<std::string>& inputs) {
  if (o.layer_path.empty() || o.features_path.empty())
    throw CLI::ValidationError("nsd-forward requires --layer and --features");
  inputs.push_back(read_file(o.layer_path));
  Json lj = parse_json_text(inputs.back());
  inputs.push_back(read_file(o.features_path));
  auto x = json_real_matrix(parse_json_text(inputs.back()), "features");
  if (!lj.is_object() || !lj.contains("W1") || !lj.contains("W2"))
    throw Error(ErrorCode::SchemaError, "layer: needs W1 and W2");
  NsdLayer layer{real_sheaf(doc), json_real_matrix(lj["W1"], "layer.W1"), json_real_matrix(lj["W2"], "layer.W2"),
                 std::nullopt, Normalization::Weak};
  if (lj.contains("eta")) layer.eta = lj["eta"].get<double>();
  if (lj.contains("norm")) layer.norm = parse_normalization(lj["norm"].get<std::string>());
  auto y = nsd_forward(layer, x);
  Json out;
  out["norm"] = to_string(layer.norm);
  out["output"] = real_matrix_json(y);
  out["shape"] = {y.rows(), y.cols()};
  return out;
}

inline Json learn_report(const SheafDocument& doc, const Options& o, std::vector<std::string>& inputs) {
  if (o.signals_path.empty()) throw CLI::ValidationError("learn requires --signals");
  inputs.push_back(read_file(o.signals_path));
  Json sj = parse_json_text(inputs.back());
  if (!sj.is_array()) throw Error(ErrorCode::SchemaError, "signals: expected an array of vectors");
  std::vector<RealVector> signals;
  for (const auto& s : sj) signals.push_back(json_real_vector(s, "signals"));
  auto res = learn_sheaf(doc.poset(), signals, {o.lr, o.iters, o.d, env_seed()});
  Json out;
  out["loss_history"] = res.loss_history;
  out["final_loss"] = res.loss_history.back();
  out["sheaf"] = sheaf_json(res.sheaf);
  return out;
}

}  // namespace detail

/// Runs one CLI invocation. Returns the process exit code: 0 success,
/// 1 domain error (error report on `out`), 2 usage error.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"posheaf: sheaves on finite posets"};
  app.require_subcommand(1);
  Options o;
  auto add = [&](const std::string& name, const std::string& help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("document", o.document, "sheaf document (JSON)")->required();
    return sub;
  };
  add("validate", "check compositionality");
  add("classify", "grading and cell-type classification of the poset");
  add("sections", "global sections by brute force");
  const CLI::IsMember methods({"roos", "cellular", "minimal"});
  add("betti", "Betti numbers")->add_option("--method", o.method, "roos | cellular | minimal")->check(methods);
  add("incidence", "minimal-complex incidence data");
  auto* spectrum = add("spectrum", "Laplacian spectrum");
  auto* diff = add("diffuse", "heat diffusion");
  for (auto* s : {spectrum, diff}) {
    s->add_option("--degree", o.degree, "cochain degree");
    s->add_option("--norm", o.norm, "none | weak | strong")->check(CLI::IsMember({"none", "weak", "strong"}));
    s->add_option("--method", o.method, "roos | cellular | minimal")->check(methods);
  }
  spectrum->add_option("--tol", o.tol, "relative zero threshold");
  diff->add_option("--eta", o.eta, "step size (default 1/(2 lambda_max))");
  diff->add_option("--steps", o.steps, "number of steps / sample times");
  diff->add_option("--mode", o.mode, "discrete | continuous")->check(CLI::IsMember({"discrete", "continuous"}));
  diff->add_option("--x0", o.x0_path, "initial state (JSON array); default is seeded random");
  auto* nsd = add("nsd-forward", "one neural sheaf diffusion layer");
  nsd->add_option("--layer", o.layer_path, "layer parameters {W1, W2, eta?, norm?}");
  nsd->add_option("--features", o.features_path, "feature matrix (JSON rows)");
  auto* lrn = add("learn", "fit restriction maps to smooth signals on a graph");
  lrn->add_option("--signals", o.signals_path, "JSON array of vertex cochains");
  lrn->add_option("--lr", o.lr, "learning rate");
  lrn->add_option("--iters", o.iters, "iterations");
  lrn->add_option("--d", o.d, "stalk dimension");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  Json report;
  report["command"] = command;
  try {
    std::vector<std::string> inputs{read_file(o.document)};
    auto doc = parse_sheaf(inputs.front());
    Json body;
    if (command == "validate") body = detail::validate(doc);
    else if (command == "classify") body = detail::classify_report(doc);
    else if (command == "sections") body = detail::sections(doc);
    else if (command == "betti") body = detail::betti_report(doc, parse_complex_kind(o.method));
    else if (command == "incidence") body = detail::incidence_report(doc);
    else if (command == "spectrum") body = detail::spectrum_report(doc, o);
    else if (command == "diffuse") body = detail::diffuse_report(doc, o, inputs);
    else if (command == "nsd-forward") body = detail::nsd_report(doc, o, inputs);
    else if (command == "learn") body = detail::learn_report(doc, o, inputs);
    for (auto it = body.begin(); it != body.end(); ++it) report[it.key()] = it.value();
    report["inputs_digest"] = digest(inputs);
    if (!doc.warnings.empty()) report["warnings"] = doc.warnings;
    out << canonical_json(report);
    return 0;
  } catch (const CLI::ValidationError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    report["error"] = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
    out << canonical_json(report);
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace posheaf::cli
