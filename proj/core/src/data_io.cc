#include "sps/data_io.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include "sps/errors.hpp"

namespace sps {

namespace {

bool parse_double(std::string_view text, double& out) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return false;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

template <typename Int>
bool parse_int(std::string_view text, Int& out) {
  if (text.empty()) return false;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

// Splits on spaces/tabs, ignoring a trailing '\r'.
std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) ++pos;
    const std::size_t start = pos;
    while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t' && line[pos] != '\r') ++pos;
    if (pos > start) tokens.push_back(line.substr(start, pos - start));
  }
  return tokens;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

}  // namespace

SparseDataset parse_libsvm(std::istream& in) {
  SparseDataset data;
  std::string line;
  std::size_t line_no = 0;
  std::vector<Index> idx;
  std::vector<double> val;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = tokenize(line);
    if (tokens.empty()) continue;

    double raw_label = 0.0;
    if (!parse_double(tokens[0], raw_label)) {
      throw ParseError(line_no, "label '" + std::string(tokens[0]) + "' is not numeric");
    }
    double label = 0.0;
    if (raw_label == 1.0) {
      label = 1.0;
    } else if (raw_label == 0.0 || raw_label == -1.0) {
      label = -1.0;
    } else {
      throw ParseError(line_no, "label '" + std::string(tokens[0]) + "' cannot be mapped to -1/+1");
    }

    idx.clear();
    val.clear();
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      const auto tok = tokens[t];
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) {
        throw ParseError(line_no, "token '" + std::string(tok) + "' is not of the form index:value");
      }
      std::int64_t one_based = 0;
      if (!parse_int(tok.substr(0, colon), one_based) || one_based < 1) {
        throw ParseError(line_no, "bad feature index in '" + std::string(tok) + "'");
      }
      double value = 0.0;
      if (!parse_double(tok.substr(colon + 1), value) || !std::isfinite(value)) {
        throw ParseError(line_no, "non-numeric value in '" + std::string(tok) + "'");
      }
      const Index j = static_cast<Index>(one_based - 1);
      if (!idx.empty() && j <= idx.back()) {
        throw ParseError(line_no, "feature indices are not strictly increasing at '" + std::string(tok) + "'");
      }
      idx.push_back(j);
      val.push_back(value);
    }
    data.push_row(label, idx, val);
  }
  if (in.bad()) throw IoError("read failure while parsing LIBSVM input");
  return data;
}

SparseDataset load_libsvm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset '" + path + "'");
  return parse_libsvm(in);
}

std::string format_real(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
  if (ec != std::errc()) throw IoError("number formatting failed");
  return {buf.data(), ptr};
}

void write_libsvm(const SparseDataset& data, std::ostream& out) {
  for (Index i = 0; i < data.num_rows(); ++i) {
    out << (data.labels[i] > 0 ? "1" : "-1");
    const auto idx = data.row_indices(i);
    const auto val = data.row_values(i);
    for (std::size_t e = 0; e < idx.size(); ++e) out << ' ' << (idx[e] + 1) << ':' << format_real(val[e]);
    out << '\n';
  }
  if (!out) throw IoError("write failure while serializing LIBSVM data");
}

void write_trace_csv(std::span<const TraceRecord> traces, std::ostream& out) {
  out << kTraceHeader << '\n';
  for (const auto& r : traces) {
    out << r.solver << ',' << r.seed << ',' << r.iteration << ',' << format_real(r.wall_time_s) << ','
        << format_real(r.residual_R) << ',';
    if (r.residual_O) out << format_real(*r.residual_O);
    out << '\n';
  }
  out.flush();
  if (!out) throw IoError("write failure while writing trace CSV");
}

std::vector<TraceRecord> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "missing trace header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceHeader) throw ParseError(1, "unexpected trace header '" + line + "'");
  std::vector<TraceRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 6) throw ParseError(line_no, "expected 6 fields");
    TraceRecord r;
    r.solver = std::string(f[0]);
    double o = 0.0;
    if (!parse_int(f[1], r.seed) || !parse_int(f[2], r.iteration) || !parse_double(f[3], r.wall_time_s) ||
        !parse_double(f[4], r.residual_R) || (!f[5].empty() && !parse_double(f[5], o))) {
      throw ParseError(line_no, "malformed trace row");
    }
    if (!f[5].empty()) r.residual_O = o;
    records.push_back(std::move(r));
  }
  return records;
}

// ---------------------------------------------------------------------------

void validate(const RunConfig& c) {
  auto fail = [](const std::string& field, const std::string& why) {
    throw ValidationError("run config field '" + field + "': " + why);
  };
  if (c.subcommand != "solve" && c.subcommand != "compare" && c.subcommand != "bench") {
    fail("subcommand", "must be solve, compare or bench");
  }
  if (c.solvers.empty()) fail("solvers", "at least one solver is required");
  for (const auto& s : c.solvers) {
    if (s != "sps" && s != "sps-decay" && s != "sps-fixed" && s != "ps" && s != "tseng" && s != "frb" &&
        s != "dseg") {
      fail("solvers", "unknown solver '" + s + "'");
    }
  }
  for (std::size_t i = 0; i < c.solvers.size(); ++i) {
    for (std::size_t j = i + 1; j < c.solvers.size(); ++j) {
      if (c.solvers[i] == c.solvers[j]) fail("solvers", "duplicate solver '" + c.solvers[i] + "'");
    }
  }
  if (c.subcommand == "solve" && c.solvers.size() != 1) fail("solvers", "solve takes exactly one solver");
  if (c.subcommand == "compare" && c.solvers.size() < 2) fail("solvers", "compare needs at least two solvers");
  if (c.problem != "drslr" && c.problem != "bilinear") fail("problem", "must be drslr or bilinear");
  for (const auto& s : c.solvers) {
    if (s == "dseg" && c.problem != "bilinear") fail("solvers", "dseg needs a problem without set-valued parts");
  }
  if (c.problem == "drslr" && c.data_path.empty() && (c.synthetic_rows < 1 || c.synthetic_features < 1)) {
    fail("synthetic_rows", "a dataset path or a positive synthetic size is required");
  }
  if (c.bilinear_dim < 1) fail("bilinear_dim", "must be >= 1");
  if (!(c.bilinear_scale > 0.0)) fail("bilinear_scale", "must be positive");
  if (!(c.noise_sigma >= 0.0)) fail("noise_sigma", "must be nonnegative");
  if (!(c.delta >= 0.0)) fail("delta", "must be nonnegative");
  if (!(c.kappa >= 0.0)) fail("kappa", "must be nonnegative");
  if (!(c.c >= 0.0)) fail("c", "must be nonnegative");
  if (c.schedule != "decay" && c.schedule != "fixed") fail("schedule", "must be decay or fixed");
  if (!(c.c_d > 0.0)) fail("c_d", "must be positive");
  if (!(c.c_f > 0.0)) fail("c_f", "must be positive");
  if (!(c.tau > 0.0)) fail("tau", "must be positive");
  if (c.oracle != "minibatch" && c.oracle != "exact") fail("oracle", "must be minibatch or exact");
  if (c.batch < 1) fail("batch", "must be >= 1");
  if (!(c.ls_alpha0 > 0.0)) fail("ls_alpha0", "must be positive");
  if (!(c.ls_theta > 0.0 && c.ls_theta < 1.0)) fail("ls_theta", "must lie in (0, 1)");
  if (!(c.ls_shrink > 0.0 && c.ls_shrink < 1.0)) fail("ls_shrink", "must lie in (0, 1)");
  if (c.iterations < 1) fail("iterations", "must be >= 1");
  if (c.trace_every < 1) fail("trace_every", "must be >= 1");
  if (c.seeds.empty()) fail("seeds", "at least one seed is required");
  if (c.out_path.empty()) fail("out_path", "an output path is required");
}

namespace {

nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["subcommand"] = c.subcommand;
  j["solvers"] = c.solvers;
  j["problem"] = c.problem;
  j["data_path"] = c.data_path;
  j["synthetic_rows"] = c.synthetic_rows;
  j["synthetic_features"] = c.synthetic_features;
  j["synthetic_seed"] = c.synthetic_seed;
  j["bilinear_dim"] = c.bilinear_dim;
  j["bilinear_scale"] = c.bilinear_scale;
  j["noise_sigma"] = c.noise_sigma;
  j["delta"] = c.delta;
  j["kappa"] = c.kappa;
  j["c"] = c.c;
  j["schedule"] = c.schedule;
  j["c_d"] = c.c_d;
  j["c_f"] = c.c_f;
  j["tau"] = c.tau;
  j["oracle"] = c.oracle;
  j["batch"] = c.batch;
  j["lipschitz"] = c.lipschitz;
  j["ls_alpha0"] = c.ls_alpha0;
  j["ls_theta"] = c.ls_theta;
  j["ls_shrink"] = c.ls_shrink;
  j["iterations"] = c.iterations;
  j["trace_every"] = c.trace_every;
  j["seeds"] = c.seeds;
  j["record_wall_time"] = c.record_wall_time;
  j["out_path"] = c.out_path;
  j["manifest_path"] = c.manifest_path;
  return j;
}

template <typename T>
void take(const nlohmann::json& j, const char* key, T& field) {
  if (!j.contains(key)) throw ValidationError(std::string("manifest is missing required field '") + key + "'");
  try {
    j.at(key).get_to(field);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("manifest field '") + key + "' has the wrong type: " + e.what());
  }
}

}  // namespace

void write_manifest(const RunConfig& config, std::ostream& out) {
  validate(config);
  out << to_json(config).dump(2) << '\n';
  out.flush();
  if (!out) throw IoError("write failure while writing manifest");
}

RunConfig read_manifest(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("manifest is not valid JSON: ") + e.what());
  }
  RunConfig c;
  take(j, "subcommand", c.subcommand);
  take(j, "solvers", c.solvers);
  take(j, "problem", c.problem);
  take(j, "data_path", c.data_path);
  take(j, "synthetic_rows", c.synthetic_rows);
  take(j, "synthetic_features", c.synthetic_features);
  take(j, "synthetic_seed", c.synthetic_seed);
  take(j, "bilinear_dim", c.bilinear_dim);
  take(j, "bilinear_scale", c.bilinear_scale);
  take(j, "noise_sigma", c.noise_sigma);
  take(j, "delta", c.delta);
  take(j, "kappa", c.kappa);
  take(j, "c", c.c);
  take(j, "schedule", c.schedule);
  take(j, "c_d", c.c_d);
  take(j, "c_f", c.c_f);
  take(j, "tau", c.tau);
  take(j, "oracle", c.oracle);
  take(j, "batch", c.batch);
  take(j, "lipschitz", c.lipschitz);
  take(j, "ls_alpha0", c.ls_alpha0);
  take(j, "ls_theta", c.ls_theta);
  take(j, "ls_shrink", c.ls_shrink);
  take(j, "iterations", c.iterations);
  take(j, "trace_every", c.trace_every);
  take(j, "seeds", c.seeds);
  take(j, "record_wall_time", c.record_wall_time);
  take(j, "out_path", c.out_path);
  take(j, "manifest_path", c.manifest_path);
  validate(c);
  return c;
}

}  // namespace sps
