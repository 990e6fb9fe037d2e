// Acceptance gate: one line per criterion, exit code = number of failures.
// Subprocess criteria drive the installed CLI exactly as a user would;
// numeric criteria rebuild the fixtures in process and interrogate the
// derived objects directly.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qglab/pipeline.hpp"

using namespace qg;
using nlohmann::json;

namespace {

const std::vector<std::string> kPositive = {"z2",    "s3",           "pair2",
                                            "pair3", "pair2_function", "union"};
const std::vector<std::string> kNegative = {"pair2_brokenE", "pair2_missing_compose",
                                            "pair2_phi_nonunit"};

std::string fixture_path(const std::string& name) {
  return std::string(QGLAB_FIXTURE_DIR) + "/" + name + ".json";
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(QGLAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1 || !WIFEXITED(status)) return -1;
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    pass = false;
    if (!detail.empty()) detail += "; ";
    detail += why;
  }
  void require(bool ok, const std::string& why) {
    if (!ok) fail(why);
  }
};

void print_line(int n, const std::string& label, const Outcome& o) {
  std::printf("%s criterion %d: %s%s%s\n", o.pass ? "PASS" : "FAIL", n, label.c_str(),
              o.detail.empty() ? "" : " | ", o.detail.c_str());
}

struct Fixture {
  std::string name;
  ParsedSpec spec;
  PipelineResult result;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

}  // namespace

int main() {
  const std::filesystem::path tmp = std::filesystem::path("acceptance_tmp");
  std::filesystem::create_directories(tmp);

  // In-process builds shared by the numeric criteria.
  std::vector<Fixture> fixtures;
  for (const auto& name : kPositive) {
    Fixture fx;
    fx.name = name;
    fx.spec = parse_spec(fixture_path(name));
    fx.result = run_pipeline(fx.spec.groupoid, fx.spec.weights, fx.spec.model, fx.spec.tamper,
                             kDefaultTol);
    if (!fx.result.built) {
      std::printf("FAIL criterion 0: fixture %s did not build\n", name.c_str());
      return 9;
    }
    fixtures.push_back(std::move(fx));
  }

  int failures = 0;

  {  // 1. CLI pass on every positive fixture, all residuals < 1e-9, under 10 s.
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    for (const auto& name : kPositive) {
      const std::string report = (tmp / (name + ".report.json")).string();
      const int code = run_cli("check " + fixture_path(name) + " --report " + report);
      o.require(code == 0, name + " exit " + std::to_string(code));
      json j = json::parse(slurp(report), nullptr, false);
      if (j.is_discarded()) {
        o.fail(name + " report unparsable");
        continue;
      }
      double worst = 0;
      for (const auto& c : j["checks"]) worst = std::max(worst, c["residual"].get<double>());
      o.require(worst < 1e-9, name + " max residual " + fmt(worst));
      o.require(j["summary"]["passed"] == j["summary"]["total"], name + " has failing checks");
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(secs < 10.0, "wall time " + fmt(secs) + " s");
    if (o.pass) o.detail = "6 fixtures, wall " + fmt(secs) + " s";
    print_line(1, "positive fixtures verify end to end", o);
    failures += !o.pass;
  }

  {  // 2. Partial isometry laws at 1e-10, relative to the projection norms.
    Outcome o;
    for (const auto& fx : fixtures) {
      const BuiltObjects& b = *fx.result.built;
      const Mat vv = b.rr.v * b.rr.v.adjoint();
      const double rv = (vv - b.rr.e_rep_v).norm() / b.rr.e_rep_v.norm();
      o.require(rv < 1e-10, fx.name + " VV* " + fmt(rv));
      for (const WInstance* wi : {&b.rr.w_psiphi, &b.rr.w_phiphi}) {
        const Mat ww = wi->w.adjoint() * wi->w;
        const double rw = (ww - wi->e_rep).norm() / wi->e_rep.norm();
        o.require(rw < 1e-10, fx.name + " W*W " + fmt(rw));
      }
    }
    print_line(2, "V and W are partial isometries onto the transported idempotent", o);
    failures += !o.pass;
  }

  {  // 3. Pentagon family at 1e-10, von Neumann closure row at 1e-9.
    Outcome o;
    for (const auto& fx : fixtures) {
      bool saw_pentagon = false, saw_vn = false;
      for (const auto& c : fx.result.report.checks()) {
        if (c.check_id.rfind("regreps.Wpentagon", 0) == 0) {
          saw_pentagon = true;
          o.require(c.residual < 1e-10, fx.name + " " + c.check_id + " " + fmt(c.residual));
        }
        if (c.check_id.rfind("regreps.vNqgroupoid", 0) == 0) {
          saw_vn = true;
          o.require(c.residual < 1e-9, fx.name + " " + c.check_id + " " + fmt(c.residual));
        }
      }
      o.require(saw_pentagon && saw_vn, fx.name + " pentagon rows missing");
    }
    print_line(3, "pentagon identities and the generated von Neumann algebra", o);
    failures += !o.pass;
  }

  {  // 4. Four independent antipode routes agree pairwise at 1e-8.
    Outcome o;
    for (const auto& fx : fixtures) {
      const BuiltObjects& b = *fx.result.built;
      std::vector<std::pair<std::string, Mat>> routes;
      routes.emplace_back("polar", b.ab.s_map);
      routes.emplace_back("wslices", antipode_from_w_slices(*b.ctx, b.rr.w_psiphi.w));
      routes.emplace_back("strongleft", antipode_from_strong_left(*b.ctx));
      routes.emplace_back("inversion", inversion_oracle(fx.spec.groupoid));
      for (size_t i = 0; i < routes.size(); ++i)
        for (size_t j = i + 1; j < routes.size(); ++j) {
          const double r = rel_residual(routes[i].second, routes[j].second);
          o.require(r < 1e-8, fx.name + " " + routes[i].first + "/" + routes[j].first + " " + fmt(r));
        }
    }
    print_line(4, "antipode routes (polar, slices, strong invariance, inversion) coincide", o);
    failures += !o.pass;
  }

  {  // 5. K is a well-posed involution with the correct polar calculus.
    Outcome o;
    for (const auto& fx : fixtures) {
      const KOperator& ko = fx.result.built->ko;
      o.require(ko.rank_defect == 0, fx.name + " rank defect " + fmt(ko.rank_defect));
      o.require(ko.solve_residual < 1e-9, fx.name + " solve " + fmt(ko.solve_residual));
      const int d = static_cast<int>(ko.k.m.rows());
      const double inv = (ko.k.m * ko.k.m.conjugate() - Mat::Identity(d, d)).norm();
      o.require(inv < 1e-9, fx.name + " K^2-id " + fmt(inv));
      const Mat ili = ko.i_op.m * ko.l.conjugate() * ko.i_op.m.conjugate();
      const double r = rel_residual(ili, ko.l.inverse());
      o.require(r < 1e-9, fx.name + " ILI vs L^-1 " + fmt(r));
    }
    print_line(5, "K solves its defining system and factors as I L^(1/2)", o);
    failures += !o.pass;
  }

  std::vector<CheckReport> late_reports(fixtures.size());
  {  // 6. Relation, restriction, phi∘R and commutation suites, plus the
     //    base restriction of S against the (E, nu)-only gamma route.
    Outcome o;
    for (size_t i = 0; i < fixtures.size(); ++i) {
      const Fixture& fx = fixtures[i];
      const BuiltObjects& b = *fx.result.built;
      CheckReport& rep = late_reports[i];
      relations_suite(*b.ctx, b.ab, kDefaultTol, rep);
      restriction_suite(*b.ctx, b.ab, b.gm, kDefaultTol, rep);
      phiR_suite(*b.ctx, b.ab, kDefaultTol, rep);
      commutation_suite(*b.ctx, b.ab, kDefaultTol, rep);
      for (const auto& c : rep.checks())
        o.require(c.residual < 1e-9, fx.name + " " + c.check_id + " " + fmt(c.residual));

      const double rb =
          rel_residual(b.ab.s_map * b.tuple.emb_b, b.tuple.emb_c * b.gm.gamma_b_from_e);
      o.require(rb < 1e-9, fx.name + " S|_B vs gamma_B(E, nu) " + fmt(rb));

      for (const double s : {0.3, 1.0})
        for (const double t : {-0.7, 0.4}) {
          const Mat sig = b.ctx->gns_phi.sigma_matrix(Cplx(s, 0));
          const Mat sigp = b.ab.sigma_prime(*b.ctx, t);
          const double rc = rel_residual(sig * sigp, sigp * sig);
          o.require(rc < 1e-9, fx.name + " sigma/sigma' commutation " + fmt(rc));
        }
    }
    print_line(6, "antipode relations, base restrictions and modular commutations", o);
    failures += !o.pass;
  }

  {  // 7. Negative controls fail loudly and on the right anchors.
    Outcome o;
    const std::map<std::string, std::vector<std::string>> expected_anchor = {
        {"pair2_brokenE", {"qgroupoid.separability.1", "qgroupoid.EDelta.1"}},
        {"pair2_missing_compose", {"examples.validategroupoid.1"}},
        {"pair2_phi_nonunit", {"qgroupoid."}},
    };
    for (const auto& name : kNegative) {
      const std::string report = (tmp / (name + ".report.json")).string();
      const int code = run_cli("check " + fixture_path(name) + " --report " + report);
      o.require(code == 1, name + " exit " + std::to_string(code));
      json j = json::parse(slurp(report), nullptr, false);
      if (j.is_discarded()) {
        o.fail(name + " report unparsable");
        continue;
      }
      double worst_fail = 0;
      std::vector<std::string> failing;
      for (const auto& c : j["checks"])
        if (!c["pass"].get<bool>()) {
          failing.push_back(c["check_id"].get<std::string>());
          worst_fail = std::max(worst_fail, c["residual"].get<double>());
        }
      o.require(worst_fail > 1e-4, name + " worst failing residual " + fmt(worst_fail));
      for (const auto& anchor : expected_anchor.at(name)) {
        bool hit = false;
        for (const auto& id : failing)
          if (id.rfind(anchor, 0) == 0) hit = true;
        o.require(hit, name + " missing anchor " + anchor);
      }
    }
    print_line(7, "tampered fixtures are rejected with named anchors", o);
    failures += !o.pass;
  }

  {  // 8. Reports are byte-deterministic across repeated runs.
    Outcome o;
    const std::string a = (tmp / "repeat_a.json").string();
    const std::string b = (tmp / "repeat_b.json").string();
    for (const auto& name : {std::string("pair3"), std::string("union")}) {
      const int c1 = run_cli("check " + fixture_path(name) + " --report " + a);
      const int c2 = run_cli("check " + fixture_path(name) + " --report " + b);
      o.require(c1 == 0 && c2 == 0, name + " rerun exit codes");
      const std::string sa = slurp(a), sb = slurp(b);
      o.require(!sa.empty() && sa == sb, name + " reports differ");
    }
    print_line(8, "repeated verification is byte-identical", o);
    failures += !o.pass;
  }

  {  // 9. The phi∘R tuple rebuild reproduces R and tau.
    Outcome o;
    for (size_t i = 0; i < fixtures.size(); ++i) {
      bool saw2 = false, saw3 = false;
      for (const auto& c : late_reports[i].checks()) {
        if (c.check_id == "antipode.propphiR.2") {
          saw2 = true;
          o.require(c.residual < 1e-8, fixtures[i].name + " R rebuild " + fmt(c.residual));
        }
        if (c.check_id == "antipode.propphiR.3") {
          saw3 = true;
          o.require(c.residual < 1e-8, fixtures[i].name + " tau rebuild " + fmt(c.residual));
        }
      }
      o.require(saw2 && saw3, fixtures[i].name + " rebuild rows missing");
    }
    print_line(9, "the composed right weight re-derives the antipode data", o);
    failures += !o.pass;
  }

  if (failures == 0) std::printf("all 9 acceptance criteria hold\n");
  return failures;
}
