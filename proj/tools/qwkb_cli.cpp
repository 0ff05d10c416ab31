// SPDX-License-Identifier: MIT
//
// qwkb — quartic-oscillator eigenvalue pipeline.
//
//   qwkb coeffs   --cache-dir DIR [--max-order K] [--digits D] ...
//   qwkb fit      --cache-dir DIR
//   qwkb eigen    --n N [--digits D]
//   qwkb compare  --cache-dir DIR [--n-from A] [--n-to B] [--out CSV] ...
//   qwkb plot     --kind fig1|fig2|fig3 [--cache-dir DIR] [--csv FILE] --out SVG
//
// Exit codes: 0 success (for `compare`: all non-flagged invariants hold),
// 1 invariant violation, 2 usage error, 3 pipeline error.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "qwkb/errors.hpp"
#include "qwkb/experiment.hpp"
#include "qwkb/spectral.hpp"

namespace {

namespace fs = std::filesystem;
using namespace qwkb;

/// Argument mistakes print usage and exit 2; pipeline errors exit 3.
struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

int usage(const char* msg = nullptr) {
  if (msg != nullptr) std::fprintf(stderr, "qwkb: %s\n", msg);
  std::fprintf(stderr,
               "usage: qwkb <command> [--flag value ...]\n"
               "\n"
               "commands:\n"
               "  coeffs    generate or refresh the coefficient caches\n"
               "            [--cache-dir D] [--max-order K] [--digits D]\n"
               "            [--alpha-phase pi/8|3pi/8] [--fit-lo L] [--fit-hi H]\n"
               "            [--progress K]\n"
               "  fit       report the fitted growth constant from the cache\n"
               "            [--cache-dir D]\n"
               "  eigen     solve one eigenvalue by shooting\n"
               "            --n N [--digits D]\n"
               "  compare   eigenvalue comparison; writes CSV, checks invariants\n"
               "            [--cache-dir D] [--n-from A] [--n-to B] [--out F.csv]\n"
               "            [--alpha-phase P] [--hat-terms T] [--eigen-digits D]\n"
               "            [--max-order K] [--digits D] [--progress 1]\n"
               "  plot      render a figure\n"
               "            --kind fig1|fig2|fig3 [--cache-dir D] [--csv F] --out F.svg\n");
  return 2;
}

struct Args {
  std::map<std::string, std::string> kv;

  static Args parse(int argc, char** argv, int first) {
    Args a;
    for (int i = first; i < argc; ++i) {
      std::string tok = argv[i];
      if (tok.rfind("--", 0) != 0)
        throw UsageError("unexpected argument '" + tok + "'");
      tok = tok.substr(2);
      const std::size_t eq = tok.find('=');
      if (eq != std::string::npos) {
        a.kv[tok.substr(0, eq)] = tok.substr(eq + 1);
      } else {
        if (i + 1 >= argc)
          throw UsageError("flag --" + tok + " needs a value");
        a.kv[tok] = argv[++i];
      }
    }
    return a;
  }

  bool has(const std::string& k) const { return kv.count(k) != 0; }

  std::string get(const std::string& k, const std::string& dflt) const {
    const auto it = kv.find(k);
    return it == kv.end() ? dflt : it->second;
  }

  long get_long(const std::string& k, long dflt) const {
    const auto it = kv.find(k);
    if (it == kv.end()) return dflt;
    try {
      std::size_t pos = 0;
      const long v = std::stol(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument(it->second);
      return v;
    } catch (const std::exception&) {
      throw UsageError("flag --" + k + " needs an integer (got '" +
                        it->second + "')");
    }
  }

  void allow_only(const std::vector<std::string>& keys) const {
    for (const auto& [k, v] : kv) {
      bool ok = false;
      for (const std::string& key : keys) ok = ok || k == key;
      if (!ok) throw UsageError("unknown flag --" + k);
    }
  }
};

RunConfig config_from(const Args& a) {
  RunConfig cfg;
  cfg.cache_dir = a.get("cache-dir", "");
  cfg.max_order = a.get_long("max-order", cfg.max_order);
  cfg.digits = a.get_long("digits", cfg.digits);
  try {
    cfg.alpha_eighths = parse_phase_eighths(a.get("alpha-phase", "pi/8"));
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  cfg.hat_terms = a.get_long("hat-terms", cfg.hat_terms);
  cfg.fit_lo = a.get_long("fit-lo", cfg.fit_lo);
  cfg.fit_hi = a.get_long("fit-hi", cfg.fit_hi);
  if (a.has("fit-tol")) {
    try {
      cfg.fit_tol = std::stod(a.get("fit-tol", ""));
    } catch (const std::exception&) {
      throw UsageError("flag --fit-tol needs a number");
    }
  }
  cfg.n_from = a.get_long("n-from", cfg.n_from);
  cfg.n_to = a.get_long("n-to", cfg.n_to);
  cfg.eigen_digits_override = a.get_long("eigen-digits", 0);
  cfg.progress = a.get_long("progress", 0);
  return cfg;
}

bool cache_complete(const std::string& dir) {
  for (const char* f : {"quantization.txt", "r.txt", "s.txt", "t.txt",
                        "ttilde.txt", "that.txt"})
    if (!fs::exists(fs::path(dir) / f)) return false;
  return true;
}

/// Load when every cache file is present; generate (or refresh) otherwise.
CachedCoefficients obtain_coefficients(const RunConfig& cfg) {
  const std::string dir = resolve_cache_dir(cfg.cache_dir);
  if (cache_complete(dir)) return load_coefficients(dir);
  return cache_coefficients(cfg);
}

int cmd_coeffs(const Args& a) {
  a.allow_only({"cache-dir", "max-order", "digits", "alpha-phase", "fit-lo",
                "fit-hi", "fit-tol", "progress", "hat-terms"});
  const RunConfig cfg = config_from(a);
  const CachedCoefficients cc = cache_coefficients(cfg);
  std::printf("cache-dir %s\n", resolve_cache_dir(cfg.cache_dir).c_str());
  std::printf("orders %ld (t through m = %zu)\n", cc.n_max, cc.t.size() - 1);
  std::printf("digits %ld\n", cc.digits);
  std::printf("a_t %s\n", cc.a_t.to_string(12).c_str());
  std::printf("fit_residual %s\n", cc.fit_residual.to_string(4).c_str());
  return 0;
}

int cmd_fit(const Args& a) {
  a.allow_only({"cache-dir"});
  const CachedCoefficients cc = load_coefficients(a.get("cache-dir", ""));
  std::printf("a_t %s\n", cc.a_t.to_string(12).c_str());
  std::printf("fit_residual %s\n", cc.fit_residual.to_string(4).c_str());
  const auto w = cc.tt.meta.find("fit_window");
  if (w != cc.tt.meta.end()) std::printf("fit_window %s\n", w->second.c_str());
  return 0;
}

int cmd_eigen(const Args& a) {
  a.allow_only({"n", "digits", "x-pad"});
  if (!a.has("n")) throw UsageError("eigen needs --n");
  const long N = a.get_long("n", 0);
  const long digits = a.get_long("digits", auto_digits(N));
  const double x_pad =
      a.has("x-pad") ? std::stod(a.get("x-pad", "0")) : 0.0;
  const EigenResult er = solve_eigenvalue(N, PrecisionContext(digits), x_pad);
  std::printf("%ld %s %ld %s %ld\n", er.N, er.E.to_string().c_str(),
              er.digits, er.x_max.to_string(6).c_str(), er.iterations);
  return 0;
}

int cmd_compare(const Args& a) {
  a.allow_only({"cache-dir", "n-from", "n-to", "out", "alpha-phase",
                "hat-terms", "eigen-digits", "max-order", "digits",
                "progress", "fit-lo", "fit-hi", "fit-tol"});
  const RunConfig cfg = config_from(a);
  const std::string out = a.get("out", "results.csv");
  const CachedCoefficients cc = obtain_coefficients(cfg);

  ProgressFn progress;
  if (cfg.progress > 0)
    progress = [](const ComparisonRecord& r) {
      std::fprintf(stderr,
                   "N=%ld Delta=%s sign=%+d sigma=%s errq=%s errt=%s "
                   "eigen=%s%s\n",
                   r.N, r.Delta.to_string(4).c_str(), r.sign,
                   r.sigma.to_string(3).c_str(),
                   r.err_quad.to_string(3).c_str(),
                   r.err_tail.to_string(3).c_str(),
                   r.eigen_err.to_string(3).c_str(),
                   r.flagged ? " [flagged]" : "");
    };
  const std::vector<ComparisonRecord> recs = run_compare(cfg, cc, progress);
  emit_csv(recs, out);
  std::printf("wrote %s (%zu rows)\n", out.c_str(), recs.size());

  const InvariantReport rep = check_invariants(recs);
  for (const std::string& note : rep.notes)
    std::printf("%s\n", note.c_str());
  std::printf("invariants: %s\n", rep.pass ? "pass" : "FAIL");
  return rep.pass ? 0 : 1;
}

int cmd_plot(const Args& a) {
  a.allow_only({"kind", "cache-dir", "csv", "out"});
  const std::string kind = a.get("kind", "");
  const std::string out = a.get("out", "");
  if (kind.empty()) throw UsageError("plot needs --kind fig1|fig2|fig3");
  if (out.empty()) throw UsageError("plot needs --out FILE.svg");

  std::vector<ComparisonRecord> recs;
  if (kind == "fig2" || kind == "fig3") {
    if (!a.has("csv")) throw UsageError("plot --kind " + kind +
                                          " needs --csv FILE");
    recs = parse_csv(a.get("csv", ""));
  }
  if (kind == "fig3") {
    emit_plot_fig3(recs, out);
  } else {
    const CachedCoefficients cc = load_coefficients(a.get("cache-dir", ""));
    emit_plot(kind, cc, recs, out);
  }
  std::printf("wrote %s\n", out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) return usage();
  const std::string cmd = argv[1];
  try {
    const Args a = Args::parse(argc, argv, 2);
    if (cmd == "coeffs") return cmd_coeffs(a);
    if (cmd == "fit") return cmd_fit(a);
    if (cmd == "eigen") return cmd_eigen(a);
    if (cmd == "compare") return cmd_compare(a);
    if (cmd == "plot") return cmd_plot(a);
    return usage(("unknown command '" + cmd + "'").c_str());
  } catch (const UsageError& e) {
    return usage(e.what());
  } catch (const Error& e) {
    std::fprintf(stderr, "qwkb: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "qwkb: %s\n", e.what());
    return 3;
  }
}
