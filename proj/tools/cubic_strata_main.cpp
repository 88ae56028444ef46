// Command-line front end.  Everything below talks to the library through
// the C API only; documents come back as strings and go to stdout or --out.
#include <cubicstrata/cubicstrata.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitUsage = 2;

struct CtxDeleter {
  void operator()(cs_ctx* c) const { cs_ctx_free(c); }
};
using CtxPtr = std::unique_ptr<cs_ctx, CtxDeleter>;

struct StrDeleter {
  void operator()(char* s) const { cs_string_free(s); }
};
using StrPtr = std::unique_ptr<char, StrDeleter>;

int exit_code(cs_status st) {
  switch (st) {
    case CS_OK: return 0;
    case CS_EINVAL: return 2;
    case CS_EUNRESOLVED: return 3;
    case CS_EFAIL: return 4;
  }
  return 4;
}

int report(cs_ctx* ctx, cs_status st) {
  if (st != CS_OK)
    std::fprintf(stderr, "cubic-strata: %s: %s\n", cs_status_message(st),
                 cs_last_error(ctx));
  return exit_code(st);
}

bool write_out(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::fputs(content.c_str(), stdout);
    return true;
  }
  std::ofstream f(path, std::ios::binary);
  f << content;
  if (!f) {
    std::fprintf(stderr, "cubic-strata: cannot write %s\n", path.c_str());
    return false;
  }
  return true;
}

// Config file named by CUBIC_STRATA_CONFIG: one key=value per line, # for
// comments.  Keys are tolerance knobs plus threads, seed and out; flags
// given on the command line override it.
struct Config {
  int threads = 1;
  unsigned long long seed = 20260822ULL;
  std::string out;
};

bool apply_config(cs_ctx* ctx, Config& cfg) {
  const char* path = std::getenv("CUBIC_STRATA_CONFIG");
  if (!path || !*path) return true;
  std::ifstream f(path);
  if (!f) {
    std::fprintf(stderr, "cubic-strata: cannot read config %s\n", path);
    return false;
  }
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "cubic-strata: %s:%d: expected key=value\n", path,
                   lineno);
      return false;
    }
    const std::string key = line.substr(first, eq - first);
    const std::string value = line.substr(eq + 1);
    try {
      if (key == "threads") {
        cfg.threads = std::stoi(value);
      } else if (key == "seed") {
        cfg.seed = std::stoull(value);
      } else if (key == "out") {
        cfg.out = value;
      } else if (cs_ctx_set_tolerance(ctx, key.c_str(),
                                      std::stod(value)) != CS_OK) {
        std::fprintf(stderr, "cubic-strata: %s:%d: unknown key %s\n", path,
                     lineno, key.c_str());
        return false;
      }
    } catch (const std::exception&) {
      std::fprintf(stderr, "cubic-strata: %s:%d: bad value for %s\n", path,
                   lineno, key.c_str());
      return false;
    }
  }
  return true;
}

bool parse_grid(const std::string& text, int& nx, int& ny) {
  const size_t x = text.find('x');
  try {
    if (x == std::string::npos) {
      nx = ny = std::stoi(text);
    } else {
      nx = std::stoi(text.substr(0, x));
      ny = std::stoi(text.substr(x + 1));
    }
  } catch (const std::exception&) {
    return false;
  }
  return nx > 0 && ny > 0;
}

bool parse_bounds(const std::string& text, double (&b)[4]) {
  std::stringstream ss(text);
  std::string part;
  for (int i = 0; i < 4; ++i) {
    if (!std::getline(ss, part, ',')) return false;
    try {
      b[i] = std::stod(part);
    } catch (const std::exception&) {
      return false;
    }
  }
  return !std::getline(ss, part, ',');
}

}  // namespace

int main(int argc, char** argv) {
  CtxPtr ctx(cs_ctx_new());
  Config cfg;
  if (!apply_config(ctx.get(), cfg)) return kExitUsage;

  CLI::App app{"Strata of the cubic field z' = z^3 + e1 z + e0"};
  app.require_subcommand(1);

  std::string e1, e0, chart = "e1_unit", grid = "201x201";
  std::string bounds = "-1,1,-1,1", out = cfg.out;
  std::vector<std::string> e1_pair, e0_pair;
  int n = 256, threads = cfg.threads;
  unsigned long long seed = cfg.seed;
  double tol_axis = 0.0;
  bool as_json = false;

  const auto add_point = [&](CLI::App* cmd) {
    cmd->add_option("--e1", e1, "e1 as a+bi, sign mandatory")->required();
    cmd->add_option("--e0", e0, "e0 as a+bi, sign mandatory")->required();
  };
  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--tol-axis", tol_axis, "override the axis tolerance");
    cmd->add_option("--out", out, "output file (default stdout)");
  };

  CLI::App* c_classify = app.add_subcommand("classify", "stratum of one point");
  add_point(c_classify);
  add_common(c_classify);
  c_classify->add_flag("--json", as_json, "print the full certificate JSON");

  CLI::App* c_portrait = app.add_subcommand("portrait", "phase portrait SVG");
  add_point(c_portrait);
  add_common(c_portrait);

  CLI::App* c_slice = app.add_subcommand("slice", "stratum map over e0");
  c_slice->add_option("--e1", e1, "fixed e1 as a+bi")->required();
  c_slice->add_option("--grid", grid, "NXxNY cells, e.g. 201x201");
  c_slice->add_option("--bounds", bounds, "x0,x1,y0,y1 box for e0");
  c_slice->add_option("--threads", threads, "sampling threads");
  c_slice->add_option("--out", out, "basename for .csv and .svg (default slice)");
  c_slice->add_option("--tol-axis", tol_axis, "override the axis tolerance");

  CLI::App* c_delta = app.add_subcommand("delta", "discriminant knot CSV");
  c_delta->add_option("--chart", chart, "e1_unit or sphere");
  c_delta->add_option("--n", n, "samples along the knot");
  add_common(c_delta);

  CLI::App* c_tau = app.add_subcommand("tau", "analytic invariants JSON");
  add_point(c_tau);
  add_common(c_tau);

  CLI::App* c_cross = app.add_subcommand(
      "cross", "one-sided tau limits across a homoclinic wall");
  c_cross->add_option("--e1", e1_pair, "start and end e1, twice")
      ->expected(2)->required();
  c_cross->add_option("--e0", e0_pair, "start and end e0, twice")
      ->expected(2)->required();
  add_common(c_cross);

  CLI::App* c_verify = app.add_subcommand("verify", "run the property suite");
  c_verify->add_option("--seed", seed, "seed for the randomized checks");
  add_common(c_verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints usage or --help text
    return e.get_exit_code() == 0 ? 0 : kExitUsage;
  }

  if (tol_axis > 0.0 &&
      cs_ctx_set_tolerance(ctx.get(), "axis", tol_axis) != CS_OK)
    return kExitUsage;

  if (c_classify->parsed()) {
    StrPtr doc;
    char* raw = nullptr;
    const cs_status st =
        cs_classify_json(ctx.get(), e1.c_str(), e0.c_str(), &raw);
    doc.reset(raw);
    if (st != CS_OK && st != CS_EUNRESOLVED) return report(ctx.get(), st);
    std::string text = doc.get();
    if (!as_json) {
      const auto j = nlohmann::json::parse(text);
      text = j["stratum"].get<std::string>() + "  digest " +
             j["digest"].get<std::string>() + "\n";
      if (st == CS_EUNRESOLVED)
        text += "diagnostic: " +
                j["certificate"]["diagnostic"].get<std::string>() + "\n";
    }
    if (!write_out(out, text)) return kExitUsage;
    return exit_code(st);
  }

  if (c_portrait->parsed()) {
    StrPtr doc;
    char* raw = nullptr;
    const cs_status st =
        cs_portrait_svg(ctx.get(), e1.c_str(), e0.c_str(), &raw);
    doc.reset(raw);
    if (st != CS_OK) return report(ctx.get(), st);
    return write_out(out, doc.get()) ? 0 : kExitUsage;
  }

  if (c_slice->parsed()) {
    int nx = 0, ny = 0;
    double b[4];
    if (!parse_grid(grid, nx, ny) || !parse_bounds(bounds, b)) {
      std::fprintf(stderr,
                   "cubic-strata: --grid wants NXxNY, --bounds wants "
                   "x0,x1,y0,y1\n");
      return kExitUsage;
    }
    if (cs_ctx_set_threads(ctx.get(), threads) != CS_OK)
      return report(ctx.get(), CS_EINVAL);
    char *csv_raw = nullptr, *svg_raw = nullptr;
    const cs_status st = cs_slice(ctx.get(), e1.c_str(), b[0], b[1], b[2],
                                  b[3], nx, ny, &csv_raw, &svg_raw);
    StrPtr csv(csv_raw), svg(svg_raw);
    if (st != CS_OK) return report(ctx.get(), st);
    const std::string base = out.empty() ? "slice" : out;
    if (!write_out(base + ".csv", csv.get()) ||
        !write_out(base + ".svg", svg.get()))
      return kExitUsage;
    std::printf("%s.csv\n%s.svg\n", base.c_str(), base.c_str());
    return 0;
  }

  if (c_delta->parsed()) {
    StrPtr doc;
    char* raw = nullptr;
    const cs_status st =
        cs_delta_knot_csv(ctx.get(), chart.c_str(), n, &raw);
    doc.reset(raw);
    if (st != CS_OK) return report(ctx.get(), st);
    return write_out(out, doc.get()) ? 0 : kExitUsage;
  }

  if (c_tau->parsed()) {
    StrPtr doc;
    char* raw = nullptr;
    const cs_status st = cs_tau_json(ctx.get(), e1.c_str(), e0.c_str(), &raw);
    doc.reset(raw);
    if (st != CS_OK) return report(ctx.get(), st);
    if (!write_out(out, std::string(doc.get()) + "\n")) return kExitUsage;
    return 0;
  }

  if (c_cross->parsed()) {
    StrPtr doc;
    char* raw = nullptr;
    const cs_status st = cs_crossing_json(
        ctx.get(), e1_pair[0].c_str(), e0_pair[0].c_str(), e1_pair[1].c_str(),
        e0_pair[1].c_str(), &raw);
    doc.reset(raw);
    if (!raw) return report(ctx.get(), st);
    if (!write_out(out, std::string(doc.get()) + "\n")) return kExitUsage;
    return report(ctx.get(), st);
  }

  // verify
  StrPtr doc;
  char* raw = nullptr;
  const cs_status st = cs_verify_json(ctx.get(), seed, &raw);
  doc.reset(raw);
  if (!raw) return report(ctx.get(), st);
  if (!write_out(out, std::string(doc.get()) + "\n")) return kExitUsage;
  if (st != CS_OK)
    std::fprintf(stderr, "cubic-strata: %s\n", cs_last_error(ctx.get()));
  return exit_code(st);
}
