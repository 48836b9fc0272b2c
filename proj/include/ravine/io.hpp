// Copyright 2026 The ravine Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RAVINE_IO_HPP_
#define RAVINE_IO_HPP_

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ravine/core.hpp"
#include "ravine/errors.hpp"
#include "ravine/lyapunov.hpp"

namespace ravine {

/// %.17g formatting; non-finite values render as an empty CSV cell and are
/// rejected in JSON.
inline std::string num(double x) {
  if (!std::isfinite(x)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string json_num(double x) {
  if (!std::isfinite(x)) throw NumericError("non-finite value in trace output");
  return num(x);
}

inline std::string json_array(const Eigen::Ref<const Vector>& v) {
  std::string out = "[";
  for (Index i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += json_num(v[i]);
  }
  return out + "]";
}

/// A file written under a temporary name and renamed into place by
/// commit(); destroyed uncommitted, it removes the partial file.
class OutputFile {
 public:
  explicit OutputFile(std::filesystem::path path)
      : path_(std::move(path)), tmp_(path_.string() + ".partial") {
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    out_.open(tmp_, std::ios::binary | std::ios::trunc);
    if (!out_) throw std::runtime_error("cannot write '" + tmp_.string() + "'");
  }
  OutputFile(const OutputFile&) = delete;
  OutputFile& operator=(const OutputFile&) = delete;
  ~OutputFile() {
    if (!committed_) {
      out_.close();
      std::error_code ec;
      std::filesystem::remove(tmp_, ec);
    }
  }

  std::ofstream& stream() { return out_; }
  const std::filesystem::path& path() const { return path_; }

  void commit() {
    out_.close();
    if (!out_) throw std::runtime_error("write failed for '" + path_.string() + "'");
    std::filesystem::rename(tmp_, path_);
    committed_ = true;
  }

 private:
  std::filesystem::path path_;
  std::filesystem::path tmp_;
  std::ofstream out_;
  bool committed_ = false;
};

/// Records kept for output: every record_every-th iteration counted from
/// the first.
inline bool retained(const Trace& trace, long k, long record_every) {
  return (k - trace.first() + 1) % record_every == 0;
}

/// JSON-lines trace: one header object, then one object per retained
/// record. Deterministic in the trace; no timestamps.
inline void write_trace_jsonl(std::ostream& out, const Trace& trace, long record_every,
                              const std::string& schedule_desc) {
  const bool nag = trace.method() == Method::nag;
  out << "{\"format\":\"ravine-trace\",\"version\":1,\"method\":\"" << to_string(trace.method())
      << "\",\"dim\":" << trace.dim() << ",\"first\":" << trace.first()
      << ",\"iterations\":" << trace.size() << ",\"record_every\":" << record_every
      << ",\"schedule\":\"" << schedule_desc << "\",\"config_hash\":\""
      << hex64(trace.meta().config_hash) << "\",\"seed\":" << trace.meta().seed
      << "}\n";
  for (long k = trace.first(); k <= trace.last(); ++k) {
    if (!retained(trace, k, record_every)) continue;
    out << "{\"k\":" << k;
    if (nag) {
      out << ",\"x\":" << json_array(trace.x(k));
    } else {
      out << ",\"y\":" << json_array(trace.y(k)) << ",\"w\":" << json_array(trace.w(k));
    }
    if (!trace.error(k).isZero(0.0)) out << ",\"e\":" << json_array(trace.error(k));
    out << ",\"s\":" << json_num(trace.s(k)) << ",\"alpha\":" << json_num(trace.coeff(k))
        << ",\"gap\":" << json_num(trace.gap(k)) << ",\"grad_norm\":"
        << json_num(trace.grad_norm(k)) << ",\"step_norm\":" << json_num(trace.step_norm(k))
        << "}\n";
  }
}

inline constexpr const char* kDiagnosticsHeader =
    "k,V,W,E,gap,grad_norm,step_norm,sum_t2_grad2,sum_st_gap";

/// Diagnostics CSV; columns not requested or undefined are left empty.
inline void write_diagnostics_csv(std::ostream& out, const DiagnosticsSeries& d,
                                  long first, long record_every, bool with_v, bool with_w,
                                  bool with_e) {
  out << kDiagnosticsHeader << '\n';
  for (std::size_t i = 0; i < d.size(); ++i) {
    if ((d.k[i] - first + 1) % record_every != 0) continue;
    out << d.k[i] << ',' << (with_v ? num(d.V[i]) : "") << ',' << (with_w ? num(d.W[i]) : "")
        << ',' << (with_e ? num(d.E[i]) : "") << ',' << num(d.gap[i]) << ','
        << num(d.grad_norm[i]) << ',' << num(d.step_norm[i]) << ',' << num(d.sum_t2_grad2[i])
        << ',' << num(d.sum_st_gap[i]) << '\n';
  }
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace ravine

#endif  // RAVINE_IO_HPP_
