#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "nullag/conc_lab.hpp"
#include "nullag/nullag_core.hpp"
#include "nullag/qcb_num.hpp"

using nlohmann::json;
using namespace nullag;

namespace {

std::vector<double> parse_double_csv(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
  return out;
}

PolyMatrixFn load_poly(const std::string& spec, int m, int n) {
  std::ifstream in(spec);
  if (in.good()) {
    std::stringstream buf;
    buf << in.rdbuf();
    return PolyMatrixFn::from_json(buf.str());
  }
  return parse_poly_spec(spec, m, n);
}

Eigen::MatrixXd parse_matrix_csv(const std::string& s, int m, int n) {
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(m, n);
  if (s.empty()) return f;
  auto vals = parse_double_csv(s);
  if (static_cast<int>(vals.size()) != m * n)
    throw CLI::ValidationError("--F", "expected " + std::to_string(m * n) + " entries");
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) f(i, j) = vals[i * n + j];
  return f;
}

RatMat parse_rat_matrix_csv(const std::string& s, int m, int n) {
  RatMat f(m, n);
  if (s.empty()) return f;
  std::stringstream ss(s);
  std::string tok;
  std::vector<Rational> vals;
  while (std::getline(ss, tok, ',')) vals.push_back(rational_from_string(tok));
  if (static_cast<int>(vals.size()) != m * n)
    throw CLI::ValidationError("--F", "expected " + std::to_string(m * n) + " entries");
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) f(i, j) = vals[i * n + j];
  return f;
}

json expansion_json(const MinorExpansion& e) {
  json out;
  out["m"] = e.m;
  out["n"] = e.n;
  out["constant"] = to_string(e.constant);
  auto terms = json::array();
  for (const auto& [key, coef] : e.beta) {
    json t;
    t["s"] = key.s;
    t["rows"] = key.rows;
    t["cols"] = key.cols;
    t["coeff"] = to_string(coef);
    terms.push_back(t);
  }
  out["terms"] = terms;
  if (e.frame) {
    auto rv = json::array();
    for (const auto& c : e.frame->rho) rv.push_back(to_string(c));
    out["normal"] = rv;
  }
  return out;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text << "\n";
  } else {
    std::ofstream out(out_path);
    out << text << "\n";
  }
}

json report_with_config(json body, json config) {
  body["config"] = std::move(config);
  return body;
}

std::string csv_with_config(const std::string& csv, const json& config) {
  std::ostringstream os;
  os << "# config: " << config.dump() << "\n" << csv;
  std::string s = os.str();
  if (!s.empty() && s.back() == '\n') s.pop_back();
  return s;
}

std::vector<TestFunction> default_test_functions(int n) {
  std::vector<TestFunction> phis;
  phis.push_back({"one", [](const Eigen::VectorXd&) { return 1.0; }});
  phis.push_back({"x1", [](const Eigen::VectorXd& x) { return x(0); }});
  phis.push_back({"x1*xn", [n](const Eigen::VectorXd& x) { return x(0) * x(n - 1); }});
  phis.push_back({"1-x1^2", [](const Eigen::VectorXd& x) { return 1.0 - x(0) * x(0); }});
  return phis;
}

int run_selftest() {
  int failures = 0;
  auto check = [&](const std::string& name, bool ok) {
    std::cout << (ok ? "pass" : "FAIL") << "  " << name << "\n";
    if (!ok) ++failures;
  };

  auto det2 = builtins::det(2);
  check("decompose_minors roundtrip on det",
        decompose_minors(det2).reconstruct().identical(det2));

  check("det is not boundary NL for e2",
        !is_boundary_nl(det2, std::vector<double>{0, 1}).is_boundary_nl);
  check("detprime is boundary NL for e3",
        is_boundary_nl(builtins::detprime(3), std::vector<double>{0, 0, 1}).is_boundary_nl);

  std::vector<Rational> e3{0, 0, 1};
  auto basis = boundary_nl_basis(2, 3, e3);
  check("basis count m=2 n=3 is 6", basis.size() == 6);
  bool all_pass = true;
  for (const auto& b : basis) all_pass = all_pass && is_boundary_nl(b, e3).is_boundary_nl;
  check("all basis elements pass is_boundary_nl", all_pass);

  auto mesh = build_standard_domain(2, Eigen::Vector2d(0, 1), 2);
  check("n=2 h=2 mesh: 8 triangles", mesh.simplices.size() == 8);
  check("n=2 h=2 mesh: area 1", std::abs(mesh.volume() - 1.0) < 1e-12);
  check("n=2 h=2 mesh: 2 gamma edges", mesh.gamma_faces.size() == 2);

  auto seq = det_concentration_sequence(4);
  QuadratureResult q = integrate_box(
      [&](const std::vector<double>& xv) {
        Eigen::Map<const Eigen::VectorXd> x(xv.data(), 2);
        return seq.grad(x).determinant();
      },
      seq.support[0], 1e-9, 1e-9);
  check("int det grad u_k = -4/3", std::abs(q.value + 4.0 / 3.0) < 1e-6);

  std::cout << (failures == 0 ? "selftest: all checks passed" : "selftest: FAILURES") << "\n";
  return failures == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nullag: null Lagrangians at the boundary — exact decisions and "
               "numerical experiments"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print usage");

  std::string poly_spec, normal_csv, f_csv, out_path = "-", format = "json";
  std::string f0_csv, seq_name = "det_concentration", ks_csv = "8,16,32,64";
  std::string deltas_csv = "1e-2,1e-3,1e-4,1e-5";
  int m = 2, n = 2, h = 8, trials = 8, dim_n = 2;
  std::uint64_t seed = 0;
  double eps = 0.1;

  // --h (mesh resolution) would collide with the default -h help short flag.
  auto subcommand = [&](const std::string& name, const std::string& desc) {
    auto* cmd = app.add_subcommand(name, desc);
    cmd->set_help_flag("--help", "print usage");
    return cmd;
  };

  auto add_poly_opts = [&](CLI::App* cmd, bool need_shape = true) {
    cmd->add_option("--poly", poly_spec, "builtin name, JSON text, or file path")->required();
    if (need_shape) {
      cmd->add_option("--m", m, "rows of the matrix variable");
      cmd->add_option("--n", n, "columns of the matrix variable");
    }
  };

  auto* decompose = subcommand("decompose", "minor-basis decomposition");
  add_poly_opts(decompose);
  decompose->add_option("--out", out_path);

  auto* check_bnl = subcommand("check-boundary-nl", "decide if f is a null Lagrangian at the boundary");
  add_poly_opts(check_bnl);
  check_bnl->add_option("--normal", normal_csv, "unit normal, comma separated")->required();
  check_bnl->add_option("--out", out_path);

  auto* basis_cmd = subcommand("basis", "spanning boundary NLs for a normal");
  basis_cmd->add_option("--m", m)->required();
  basis_cmd->add_option("--n", n)->required();
  basis_cmd->add_option("--normal", normal_csv)->required();
  basis_cmd->add_option("--out", out_path);

  auto* special = subcommand("special-form", "subtract the linearization at F0");
  add_poly_opts(special);
  special->add_option("--F", f0_csv, "F0 entries, row-major rationals")->required();
  special->add_option("--out", out_path);

  auto* qcb = subcommand("qcb", "quasiconvexity-at-the-boundary deficit");
  add_poly_opts(qcb);
  qcb->add_option("--normal", normal_csv)->required();
  qcb->add_option("--F", f_csv, "base matrix, row-major (default 0)");
  qcb->add_option("--h", h);
  qcb->add_option("--trials", trials);
  qcb->add_option("--seed", seed);
  qcb->add_option("--out", out_path);

  auto* env0 = subcommand("envelope0", "boundary envelope sign certificate at 0");
  add_poly_opts(env0);
  env0->add_option("--normal", normal_csv)->required();
  env0->add_option("--h", h);
  env0->add_option("--trials", trials);
  env0->add_option("--seed", seed);
  env0->add_option("--out", out_path);

  auto* iqc = subcommand("interior-qc", "interior quasiconvexity deficit");
  add_poly_opts(iqc);
  iqc->add_option("--F", f_csv);
  iqc->add_option("--h", h);
  iqc->add_option("--trials", trials);
  iqc->add_option("--seed", seed);
  iqc->add_option("--out", out_path);

  auto* weakcont = subcommand("weakcont", "weak-continuity experiment");
  weakcont->add_option("--f", poly_spec, "integrand: det or detprime")
      ->default_val("det");
  weakcont->add_option("--seq", seq_name,
                       "det_concentration | detprime_face | interior_concentration")
      ->default_val("det_concentration");
  weakcont->add_option("--ks", ks_csv, "k values, comma separated");
  weakcont->add_option("--out", out_path);
  weakcont->add_option("--format", format, "json | csv");

  auto* counterex = subcommand("counterex", "higher-integrability scalings");
  counterex->add_option("--n", dim_n)->required();
  counterex->add_option("--ks", ks_csv);
  counterex->add_option("--eps", eps);
  counterex->add_option("--deltas", deltas_csv);
  counterex->add_option("--out", out_path);
  counterex->add_option("--format", format, "json | csv");

  subcommand("selftest", "run the built-in invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  json config;
  config["argv"] = std::vector<std::string>(argv + 1, argv + argc);
  config["seed"] = seed;

  try {
    if (app.got_subcommand("selftest")) return run_selftest();

    if (app.got_subcommand(decompose)) {
      auto f = load_poly(poly_spec, m, n);
      json j;
      j["schema_version"] = "v1";
      try {
        MinorExpansion e = decompose_minors(f);
        j["quasiaffine"] = true;
        j["expansion"] = expansion_json(e);
      } catch (const not_quasiaffine& ex) {
        j["quasiaffine"] = false;
        j["expansion"] = nullptr;
        auto bad = json::array();
        for (const auto& e : ex.residual_monomials) bad.push_back(e);
        j["residual_monomials"] = bad;
      }
      emit(report_with_config(j, config).dump(2), out_path);
      return 0;
    }

    if (app.got_subcommand(check_bnl)) {
      auto f = load_poly(poly_spec, m, n);
      auto verdict = is_boundary_nl(f, parse_double_csv(normal_csv));
      json j = json::parse(verdict.to_json());
      emit(report_with_config(j, config).dump(2), out_path);
      return 0;
    }

    if (app.got_subcommand(basis_cmd)) {
      auto rho = rational_unit_normal(parse_double_csv(normal_csv));
      auto basis = boundary_nl_basis(m, n, rho.rho);
      json j;
      j["schema_version"] = "v1";
      j["count"] = basis.size();
      j["rationalized_normal"] = rho.rationalized;
      auto arr = json::array();
      for (const auto& b : basis) arr.push_back(json::parse(b.to_json()));
      j["basis"] = arr;
      emit(report_with_config(j, config).dump(2), out_path);
      return 0;
    }

    if (app.got_subcommand(special)) {
      auto f = load_poly(poly_spec, m, n);
      auto g = special_form(f, parse_rat_matrix_csv(f0_csv, m, n));
      emit(g.to_json(), out_path);
      return 0;
    }

    if (app.got_subcommand(qcb) || app.got_subcommand(env0) || app.got_subcommand(iqc)) {
      auto f = load_poly(poly_spec, m, n);
      QCBReport rep;
      if (app.got_subcommand(qcb)) {
        auto rho_d = parse_double_csv(normal_csv);
        Eigen::Map<Eigen::VectorXd> rho(rho_d.data(), rho_d.size());
        rep = qcb_deficit(f, parse_matrix_csv(f_csv, f.rows(), f.cols()), rho, h, trials, seed);
      } else if (app.got_subcommand(env0)) {
        auto rho_d = parse_double_csv(normal_csv);
        Eigen::Map<Eigen::VectorXd> rho(rho_d.data(), rho_d.size());
        rep = qcb_envelope0(f, rho, h, trials, seed);
      } else {
        rep = interior_qc_deficit(f, parse_matrix_csv(f_csv, f.rows(), f.cols()), h, trials,
                                  seed);
      }
      json j = json::parse(rep.to_json());
      emit(report_with_config(j, config).dump(2), out_path);
      return 0;
    }

    if (app.got_subcommand(weakcont)) {
      std::function<AnalyticSequence(int)> make_seq;
      PolyMatrixFn f;
      if (seq_name == "det_concentration") {
        make_seq = det_concentration_sequence;
        f = poly_spec == "det" || poly_spec.empty() ? builtins::det(2) : load_poly(poly_spec, 2, 2);
      } else if (seq_name == "detprime_face") {
        make_seq = detprime_face_concentration_sequence;
        f = poly_spec == "detprime" || poly_spec == "det" ? builtins::detprime(3)
                                                          : load_poly(poly_spec, 2, 3);
      } else if (seq_name == "interior_concentration") {
        make_seq = interior_concentration_sequence;
        f = poly_spec == "det" || poly_spec.empty() ? builtins::det(2) : load_poly(poly_spec, 2, 2);
      } else {
        throw CLI::ValidationError("--seq", "unknown sequence '" + seq_name + "'");
      }
      auto rep = weak_continuity_experiment(f, make_seq,
                                            default_test_functions(make_seq(1).domain_dim),
                                            parse_int_list(ks_csv));
      if (format == "csv")
        emit(csv_with_config(rep.to_csv(), config), out_path);
      else
        emit(report_with_config(json::parse(rep.to_json()), config).dump(2), out_path);
      return 0;
    }

    if (app.got_subcommand(counterex)) {
      auto rep =
          higher_integrability_experiment(dim_n, parse_int_list(ks_csv), eps,
                                          parse_double_csv(deltas_csv));
      if (format == "csv")
        emit(csv_with_config(rep.to_csv(), config), out_path);
      else
        emit(report_with_config(json::parse(rep.to_json()), config).dump(2), out_path);
      return 0;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const optimization_failure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
