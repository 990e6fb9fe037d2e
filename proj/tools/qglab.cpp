#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qglab/pipeline.hpp"

namespace {

using namespace qg;

constexpr int kExitChecksFailed = 1;
constexpr int kExitBadInput = 2;

int fail_input(const std::string& msg) {
  std::fprintf(stderr, "error: %s\n", msg.c_str());
  return kExitBadInput;
}

// "report.json" + "function" -> "report.function.json"
std::string with_model_suffix(const std::string& path, const std::string& model) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return path + "." + model;
  return path.substr(0, dot) + "." + model + path.substr(dot);
}

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << content;
  return static_cast<bool>(out);
}

std::vector<ModelKind> expand_models(ModelKind m) {
  if (m == ModelKind::kBoth) return {ModelKind::kFunction, ModelKind::kConvolution};
  return {m};
}

ModelKind effective_model(const ParsedSpec& spec, const std::string& override_name) {
  if (override_name.empty()) return spec.model;
  return model_from_name(override_name);
}

int cmd_check(const std::string& path, Real tol, const std::string& report_path,
              const std::string& model_override) {
  ParsedSpec spec = parse_spec(path);
  const ModelKind chosen = effective_model(spec, model_override);
  const std::vector<ModelKind> models = expand_models(chosen);

  int exit_code = 0;
  for (ModelKind m : models) {
    PipelineResult r = run_pipeline(spec.groupoid, spec.weights, m, spec.tamper, tol);
    const std::string name = model_name(m);
    std::printf("%s [%s]: %d/%d checks passed, max residual %.3e\n", path.c_str(), name.c_str(),
                r.report.passed(), r.report.total(), r.report.max_residual());
    for (const auto& c : r.report.failures())
      std::printf("  FAIL %s (%s) residual=%.3e tol=%.3e\n", c.check_id.c_str(),
                  c.paper_ref.c_str(), c.residual, c.tol);
    if (!report_path.empty()) {
      const std::string out =
          models.size() == 1 ? report_path : with_model_suffix(report_path, name);
      if (!write_file(out, r.report.to_json()))
        return fail_input("cannot write report to " + out);
    }
    if (!r.report.all_pass()) exit_code = kExitChecksFailed;
  }
  return exit_code;
}

int cmd_derive(const std::string& path, const std::string& what, Real t, std::string out_dir,
               const std::string& model_override) {
  ParsedSpec spec = parse_spec(path);
  const ModelKind chosen = effective_model(spec, model_override);
  const std::vector<ModelKind> models = expand_models(chosen);
  if (!out_dir.empty() && out_dir.back() != '/') out_dir += '/';

  for (ModelKind m : models) {
    QGTuple tuple = m == ModelKind::kFunction
                        ? function_model(spec.groupoid, spec.weights, spec.tamper)
                        : convolution_model(spec.groupoid, spec.weights, spec.tamper);
    const std::unique_ptr<BuiltObjects> built = build_all(std::move(tuple));
    const Mat obj = derived_object(*built, what, t);
    const std::string header =
        derived_header(*built, what, t) + "; model: " + model_name(m) + "; source: " + path;
    const std::string file = out_dir + what + (models.size() == 1 ? "" : "." + model_name(m)) +
                             ".txt";
    if (!write_file(file, format_matrix_text(header, obj)))
      return fail_input("cannot write " + file);
    std::printf("wrote %s\n", file.c_str());
  }
  return 0;
}

RealVec parse_weight_list(const std::string& csv, int n, const char* flag) {
  RealVec w = RealVec::Ones(n);
  if (csv.empty()) return w;
  std::vector<Real> vals;
  std::string cur;
  for (char ch : csv + ",") {
    if (ch == ',') {
      if (cur.empty()) throw SpecError(std::string(flag) + ": empty entry in \"" + csv + "\"");
      vals.push_back(std::stod(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (static_cast<int>(vals.size()) != n)
    throw SpecError(std::string(flag) + ": expected " + std::to_string(n) + " entries, got " +
                    std::to_string(vals.size()));
  for (int i = 0; i < n; ++i) {
    if (!(vals[i] > 0)) throw SpecError(std::string(flag) + ": weights must be positive");
    w(i) = vals[i];
  }
  return w;
}

FiniteGroupoid group_by_name(const std::string& name) {
  if (name == "s3") return group_groupoid(s3_table());
  if (name.size() >= 2 && name[0] == 'z') {
    const int n = std::stoi(name.substr(1));
    if (n >= 1) return group_groupoid(cyclic_table(n));
  }
  throw SpecError("unknown group table \"" + name + "\" (expected z<n> or s3)");
}

FiniteGroupoid piece_by_spec(const std::string& of) {
  const auto colon = of.find(':');
  if (colon == std::string::npos)
    throw SpecError("--of entry \"" + of + "\" is not of the form kind:param");
  const std::string kind = of.substr(0, colon), param = of.substr(colon + 1);
  if (kind == "pair") return pair_groupoid(std::stoi(param));
  if (kind == "group") return group_by_name(param);
  throw SpecError("--of entry \"" + of + "\": unknown kind \"" + kind + "\"");
}

int cmd_example(const std::string& kind, int n, const std::string& table,
                const std::vector<std::string>& of, const std::string& m_csv,
                const std::string& right_csv, const std::string& model_name_arg,
                const std::string& out_path) {
  FiniteGroupoid g;
  if (kind == "pair") {
    if (n < 1) throw SpecError("example pair: --n must be >= 1");
    g = pair_groupoid(n);
  } else if (kind == "group") {
    g = group_by_name(table);
  } else if (kind == "union") {
    if (of.size() < 2) throw SpecError("example union: need at least two --of entries");
    g = piece_by_spec(of[0]);
    for (size_t i = 1; i < of.size(); ++i) g = disjoint_union(g, piece_by_spec(of[i]));
  } else {
    throw SpecError("unknown example kind \"" + kind + "\" (expected pair|group|union)");
  }
  const auto violations = groupoid_violations(g);
  if (!violations.empty()) throw SpecError("generated groupoid invalid: " + violations.front());

  HaarWeights hw;
  hw.m = parse_weight_list(m_csv, g.n_units(), "--m");
  hw.n = parse_weight_list(right_csv, g.n_units(), "--right");
  const std::string text = write_spec(g, hw, model_from_name(model_name_arg));
  if (out_path.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    if (!write_file(out_path, text)) return fail_input("cannot write " + out_path);
    std::printf("wrote %s\n", out_path.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite quantum groupoid construction and verification"};
  app.require_subcommand(1);

  std::string path, report_path, model_override;
  Real tol = 1e-9;
  auto* check = app.add_subcommand("check", "Run every check suite and write a report");
  check->add_option("path", path, "groupoid description file")->required();
  check->add_option("--tol", tol, "residual tolerance (default 1e-9)");
  check->add_option("--report", report_path, "write the JSON report here");
  check->add_option("--model", model_override, "override the file's model")
      ->check(CLI::IsMember({"function", "convolution", "both"}));

  std::string what, out_dir = ".";
  Real t_param = 0;
  auto* derive = app.add_subcommand("derive", "Write one derived matrix as plain text");
  derive->add_option("path", path, "groupoid description file")->required();
  derive->add_option("--what", what, "which object to write")
      ->required()
      ->check(CLI::IsMember({"S", "R", "tau", "W", "V", "K", "L", "nabla", "E"}));
  derive->add_option("--t", t_param, "time parameter for tau (default 0)");
  derive->add_option("--out", out_dir, "output directory (default .)");
  derive->add_option("--model", model_override, "override the file's model")
      ->check(CLI::IsMember({"function", "convolution", "both"}));

  std::string kind, table, m_csv, right_csv, model_arg = "convolution", out_path;
  int n = 0;
  std::vector<std::string> of;
  auto* example = app.add_subcommand("example", "Emit a groupoid description file");
  example->add_option("kind", kind, "pair | group | union")->required();
  example->add_option("--n", n, "pair groupoid size");
  example->add_option("--table", table, "group table name (z<n> or s3)");
  example->add_option("--of", of, "union pieces, e.g. pair:2 group:z3");
  example->add_option("--m", m_csv, "left weights per unit, comma separated (default 1s)");
  example->add_option("--right", right_csv, "right weights per unit (default 1s)");
  example->add_option("--model", model_arg, "model field of the emitted file")
      ->check(CLI::IsMember({"function", "convolution", "both"}));
  example->add_option("--out", out_path, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitBadInput;
  }

  try {
    if (check->parsed()) return cmd_check(path, tol, report_path, model_override);
    if (derive->parsed()) return cmd_derive(path, what, t_param, out_dir, model_override);
    return cmd_example(kind, n, table, of, m_csv, right_csv, model_arg, out_path);
  } catch (const SpecError& e) {
    return fail_input(e.what());
  } catch (const std::exception& e) {
    return fail_input(e.what());
  }
}
