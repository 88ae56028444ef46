#include "cubicstrata/cubicstrata.h"

#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>

#include "atlas.hpp"
#include "ds_invariants.hpp"
#include "render.hpp"
#include "verify.hpp"

using namespace cubicstrata;

struct cs_ctx {
  Tolerances tol;
  int threads = 1;
  std::string last_error;
};

namespace {

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

cs_status fail(cs_ctx* ctx, cs_status status, const std::string& msg) {
  if (ctx) ctx->last_error = msg;
  return status;
}

bool parse_arg(cs_ctx* ctx, const char* text, const char* name, Complex& out,
               cs_status& status) {
  if (!text) {
    status = fail(ctx, CS_EINVAL, std::string(name) + " is null");
    return false;
  }
  const auto v = parse_complex(text);
  if (!v) {
    status = fail(ctx, CS_EINVAL,
                  std::string(name) + ": expected a+bi form, got \"" + text +
                      "\"");
    return false;
  }
  out = *v;
  status = CS_OK;
  return true;
}

// invalid_argument is a caller mistake, runtime_error an unresolved
// computation, anything else an internal failure.
template <typename Fn>
cs_status guarded(cs_ctx* ctx, Fn&& fn) {
  if (!ctx) return CS_EINVAL;
  ctx->last_error.clear();
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    return fail(ctx, CS_EINVAL, e.what());
  } catch (const std::runtime_error& e) {
    return fail(ctx, CS_EUNRESOLVED, e.what());
  } catch (const std::exception& e) {
    return fail(ctx, CS_EFAIL, e.what());
  }
}

}  // namespace

extern "C" {

cs_ctx* cs_ctx_new(void) { return new (std::nothrow) cs_ctx; }

void cs_ctx_free(cs_ctx* ctx) { delete ctx; }

cs_status cs_ctx_set_tolerance(cs_ctx* ctx, const char* name, double value) {
  if (!ctx || !name) return CS_EINVAL;
  ctx->last_error.clear();
  if (!set_tolerance(ctx->tol, name, value))
    return fail(ctx, CS_EINVAL, std::string("unknown tolerance \"") + name +
                                    "\"");
  return CS_OK;
}

cs_status cs_ctx_set_threads(cs_ctx* ctx, int threads) {
  if (!ctx) return CS_EINVAL;
  ctx->last_error.clear();
  if (threads < 1)
    return fail(ctx, CS_EINVAL, "threads must be at least 1");
  ctx->threads = threads;
  return CS_OK;
}

const char* cs_last_error(const cs_ctx* ctx) {
  return ctx ? ctx->last_error.c_str() : "";
}

const char* cs_status_message(cs_status status) {
  switch (status) {
    case CS_OK: return "ok";
    case CS_EINVAL: return "invalid argument";
    case CS_EUNRESOLVED: return "unresolved";
    case CS_EFAIL: return "property or numeric failure";
  }
  return "unknown status";
}

cs_status cs_classify_json(cs_ctx* ctx, const char* e1, const char* e0,
                           char** out_json) {
  return guarded(ctx, [&]() -> cs_status {
    if (!out_json) return fail(ctx, CS_EINVAL, "out_json is null");
    Params p;
    cs_status st;
    if (!parse_arg(ctx, e1, "e1", p.e1, st) ||
        !parse_arg(ctx, e0, "e0", p.e0, st))
      return st;
    const ClassifyResult res = classify(p, ctx->tol);
    const std::string doc =
        "{\"stratum\":\"" + stratum_label(res.stratum) + "\",\"certificate\":" +
        certificate_json(res.cert) + ",\"digest\":\"" +
        certificate_digest(res.cert) + "\"}";
    *out_json = dup_string(doc);
    if (res.stratum.tag == StratumTag::unresolved)
      return fail(ctx, CS_EUNRESOLVED, res.cert.diagnostic);
    return CS_OK;
  });
}

cs_status cs_portrait_svg(cs_ctx* ctx, const char* e1, const char* e0,
                          char** out_svg) {
  return guarded(ctx, [&]() -> cs_status {
    if (!out_svg) return fail(ctx, CS_EINVAL, "out_svg is null");
    Params p;
    cs_status st;
    if (!parse_arg(ctx, e1, "e1", p.e1, st) ||
        !parse_arg(ctx, e0, "e0", p.e0, st))
      return st;
    TraceOptions opts;
    opts.record = true;
    const auto traces = trace_separatrices(p, ctx->tol, opts);
    *out_svg = dup_string(portrait_svg(p, traces, {}, ctx->tol));
    return CS_OK;
  });
}

cs_status cs_trace_csv(cs_ctx* ctx, const char* e1, const char* e0,
                       int sep_index, char** out_csv) {
  return guarded(ctx, [&]() -> cs_status {
    if (!out_csv) return fail(ctx, CS_EINVAL, "out_csv is null");
    if (sep_index < 1 || sep_index > 4)
      return fail(ctx, CS_EINVAL, "sep_index must be 1..4");
    Params p;
    cs_status st;
    if (!parse_arg(ctx, e1, "e1", p.e1, st) ||
        !parse_arg(ctx, e0, "e0", p.e0, st))
      return st;
    TraceOptions opts;
    opts.record = true;
    const auto traces = trace_separatrices(p, ctx->tol, opts);
    *out_csv = dup_string(trajectory_csv(traces[sep_index - 1].traj));
    return CS_OK;
  });
}

cs_status cs_slice(cs_ctx* ctx, const char* e1, double x0, double x1,
                   double y0, double y1, int nx, int ny, char** out_csv,
                   char** out_svg) {
  return guarded(ctx, [&]() -> cs_status {
    SliceSpec spec;
    cs_status st;
    if (!parse_arg(ctx, e1, "e1", spec.e1, st)) return st;
    spec.x0 = x0;
    spec.x1 = x1;
    spec.y0 = y0;
    spec.y1 = y1;
    spec.nx = nx;
    spec.ny = ny;
    const StratumGrid grid = sample_slice(spec, ctx->tol, ctx->threads);
    if (out_csv) *out_csv = dup_string(grid_csv(grid));
    if (out_svg) *out_svg = dup_string(slice_svg(grid));
    return CS_OK;
  });
}

cs_status cs_delta_knot_csv(cs_ctx* ctx, const char* chart, int n,
                            char** out_csv) {
  return guarded(ctx, [&]() -> cs_status {
    if (!out_csv) return fail(ctx, CS_EINVAL, "out_csv is null");
    if (!chart) return fail(ctx, CS_EINVAL, "chart is null");
    Chart c;
    if (std::strcmp(chart, "e1_unit") == 0) {
      c = Chart::e1_unit;
    } else if (std::strcmp(chart, "sphere") == 0) {
      c = Chart::sphere;
    } else {
      return fail(ctx, CS_EINVAL,
                  std::string("chart must be e1_unit or sphere, got \"") +
                      chart + "\"");
    }
    *out_csv = dup_string(knot_csv(trace_delta_knot(n, c, ctx->tol)));
    return CS_OK;
  });
}

cs_status cs_tau_json(cs_ctx* ctx, const char* e1, const char* e0,
                      char** out_json) {
  return guarded(ctx, [&]() -> cs_status {
    if (!out_json) return fail(ctx, CS_EINVAL, "out_json is null");
    Params p;
    cs_status st;
    if (!parse_arg(ctx, e1, "e1", p.e1, st) ||
        !parse_arg(ctx, e0, "e0", p.e0, st))
      return st;
    *out_json = dup_string(ds_invariant_json(tau_pair(p, ctx->tol)));
    return CS_OK;
  });
}

cs_status cs_crossing_json(cs_ctx* ctx, const char* e1a, const char* e0a,
                           const char* e1b, const char* e0b,
                           char** out_json) {
  return guarded(ctx, [&]() -> cs_status {
    if (!out_json) return fail(ctx, CS_EINVAL, "out_json is null");
    Params a, b;
    cs_status st;
    if (!parse_arg(ctx, e1a, "e1a", a.e1, st) ||
        !parse_arg(ctx, e0a, "e0a", a.e0, st) ||
        !parse_arg(ctx, e1b, "e1b", b.e1, st) ||
        !parse_arg(ctx, e0b, "e0b", b.e0, st))
      return st;
    const CrossingReport rep = crossing_table(a, b, ctx->tol);
    *out_json = dup_string(crossing_report_json(rep));
    if (!rep.pass)
      return fail(ctx, CS_EFAIL, "crossing relations exceeded tolerance");
    return CS_OK;
  });
}

cs_status cs_verify_json(cs_ctx* ctx, unsigned long long seed,
                         char** out_json) {
  return guarded(ctx, [&]() -> cs_status {
    if (!out_json) return fail(ctx, CS_EINVAL, "out_json is null");
    const auto results = run_verification(seed, ctx->tol);
    *out_json = dup_string(verification_json(results));
    for (const CheckResult& c : results)
      if (!c.pass) return fail(ctx, CS_EFAIL, c.name + " failed: " + c.detail);
    return CS_OK;
  });
}

void cs_string_free(char* s) { std::free(s); }

}  // extern "C"
