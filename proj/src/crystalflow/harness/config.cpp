// Copyright 2026 The crystalflow Authors.
// SPDX-License-Identifier: Apache-2.0

#include "crystalflow/harness/config.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace crystalflow {

Grid GridSpec::make() const { return Grid(dim, nodes, extents); }

bool GridSpec::operator==(const GridSpec& other) const {
  if (dim != other.dim) return false;
  for (int a = 0; a < std::min(dim, 2); ++a) {
    if (nodes[a] != other.nodes[a] || extents[a] != other.extents[a]) {
      return false;
    }
  }
  return true;
}

ExperimentConfig ExperimentConfig::canonical() const {
  ExperimentConfig c = *this;
  const InitialSpec d;
  InitialSpec& ic = c.initial;
  if (ic.kind != ProfileKind::Constant) ic.value = d.value;
  if (ic.kind != ProfileKind::Cosine && ic.kind != ProfileKind::GaussianBump &&
      ic.kind != ProfileKind::RandomSmooth) {
    ic.amplitude = d.amplitude;
  }
  if (ic.kind != ProfileKind::Cosine) ic.mode = d.mode;
  if (ic.kind != ProfileKind::GaussianBump) ic.width = d.width;
  if (ic.kind != ProfileKind::RandomSmooth) ic.seed.reset();
  if (ic.kind != ProfileKind::Snapshot) ic.path.clear();
  if (c.scheme.coupling.kind == RegCoupling::Kind::TauCoupled) {
    c.scheme.coupling.eps = 0.0;
  }
  const Variant dv;
  if (c.variant.kind != VariantKind::ScaledSinh) {
    c.variant.K = dv.K;
    c.variant.normalized = dv.normalized;
  }
  if (c.variant.kind != VariantKind::PExponent) c.variant.p = dv.p;
  return c;
}

bool ExperimentConfig::operator==(const ExperimentConfig& other) const {
  const ExperimentConfig a = canonical();
  const ExperimentConfig b = other.canonical();
  return a.grid == b.grid && a.initial == b.initial && a.scheme == b.scheme &&
         a.variant == b.variant && a.output == b.output;
}

std::vector<ReportKind> ExperimentConfig::effective_reports() const {
  if (!output.reports.empty()) return output.reports;
  if (variant.uses_p_laplacian()) return {ReportKind::PEnergy};
  return {ReportKind::Prop31, ReportKind::Prop32, ReportKind::Prop33};
}

std::string profile_name(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::Constant: return "constant";
    case ProfileKind::Cosine: return "cosine";
    case ProfileKind::GaussianBump: return "gaussian_bump";
    case ProfileKind::RandomSmooth: return "random_smooth";
    case ProfileKind::Snapshot: return "snapshot";
  }
  return "?";
}

std::string report_name(ReportKind kind) {
  switch (kind) {
    case ReportKind::Prop31: return "prop31";
    case ReportKind::Prop32: return "prop32";
    case ReportKind::Prop33: return "prop33";
    case ReportKind::PEnergy: return "p_energy";
  }
  return "?";
}

namespace {

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : Error(ErrorCode::Config, "invalid configuration:\n  " + join(issues, "\n  ")),
      issues_(std::move(issues)) {}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.emplace_back(trim(s.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::optional<double> to_real(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

template <class Int>
std::optional<Int> to_integer(const std::string& s) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<bool> to_bool(const std::string& s) {
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  return std::nullopt;
}

struct Entry {
  std::string section;
  std::string key;
  std::string value;
  int line;
};

using Issues = std::vector<std::string>;

std::string at(int line, const std::string& msg) {
  return line > 0 ? "line " + std::to_string(line) + ": " + msg : msg;
}

// Applies one entry; returns an error message on type mismatch.
using Setter =
    std::function<std::optional<std::string>(ExperimentConfig&, const std::string&)>;

template <class Get>
Setter real_setter(Get get) {
  return [get](ExperimentConfig& c, const std::string& v)
             -> std::optional<std::string> {
    const auto r = to_real(v);
    if (!r) return "expected a finite real number, got '" + v + "'";
    get(c) = *r;
    return std::nullopt;
  };
}

template <class Get>
Setter int_setter(Get get) {
  return [get](ExperimentConfig& c, const std::string& v)
             -> std::optional<std::string> {
    const auto r = to_integer<int>(v);
    if (!r) return "expected an integer, got '" + v + "'";
    get(c) = *r;
    return std::nullopt;
  };
}

template <class Get>
Setter bool_setter(Get get) {
  return [get](ExperimentConfig& c, const std::string& v)
             -> std::optional<std::string> {
    const auto r = to_bool(v);
    if (!r) return "expected true or false, got '" + v + "'";
    get(c) = *r;
    return std::nullopt;
  };
}

template <class T, class Get>
Setter enum_setter(Get get, std::vector<std::pair<std::string, T>> names) {
  return [get, names](ExperimentConfig& c, const std::string& v)
             -> std::optional<std::string> {
    std::vector<std::string> options;
    for (const auto& [n, e] : names) {
      if (n == v) {
        get(c) = e;
        return std::nullopt;
      }
      options.push_back(n);
    }
    return "expected one of {" + join(options, ", ") + "}, got '" + v + "'";
  };
}

const std::vector<std::pair<std::string, ProfileKind>> kProfiles = {
    {"constant", ProfileKind::Constant},
    {"cosine", ProfileKind::Cosine},
    {"gaussian_bump", ProfileKind::GaussianBump},
    {"random_smooth", ProfileKind::RandomSmooth},
    {"snapshot", ProfileKind::Snapshot}};

const std::vector<std::pair<std::string, VariantKind>> kVariants = {
    {"sinh", VariantKind::Sinh},
    {"exp", VariantKind::Exp},
    {"scaled_sinh", VariantKind::ScaledSinh},
    {"linear", VariantKind::Linear},
    {"p_exponent", VariantKind::PExponent}};

const std::vector<std::pair<std::string, RegCoupling::Kind>> kCouplings = {
    {"coupled", RegCoupling::Kind::TauCoupled},
    {"decoupled", RegCoupling::Kind::Decoupled}};

const std::vector<std::pair<std::string, PicardMap>> kPicardMaps = {
    {"frozen_coupled", PicardMap::FrozenCoupled},
    {"alternating", PicardMap::Alternating}};

const std::vector<std::pair<std::string, LinearBackend>> kBackends = {
    {"cg", LinearBackend::ConjugateGradient},
    {"cholesky", LinearBackend::SparseCholesky}};

const std::vector<std::pair<std::string, ReportKind>> kReports = {
    {"prop31", ReportKind::Prop31},
    {"prop32", ReportKind::Prop32},
    {"prop33", ReportKind::Prop33},
    {"p_energy", ReportKind::PEnergy}};

template <class T>
std::string name_of(const std::vector<std::pair<std::string, T>>& names, T e) {
  for (const auto& [n, v] : names) {
    if (v == e) return n;
  }
  return "?";
}

// Per-axis list keys: one value applies to every axis.
template <class T, class Conv>
Setter axis_setter(std::array<T, 2> GridSpec::*member, Conv conv,
                   const char* what) {
  return [member, conv, what](ExperimentConfig& c, const std::string& v)
             -> std::optional<std::string> {
    const auto parts = split_list(v);
    if (parts.size() > 2) return std::string("at most two values per axis");
    std::array<T, 2> out{};
    for (std::size_t a = 0; a < parts.size(); ++a) {
      const auto r = conv(parts[a]);
      if (!r) return std::string("expected ") + what + ", got '" + parts[a] + "'";
      out[a] = *r;
    }
    if (parts.size() == 1) out[1] = out[0];
    c.grid.*member = out;
    return std::nullopt;
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    t["grid.dim"] = int_setter([](ExperimentConfig& c) -> int& { return c.grid.dim; });
    t["grid.nodes"] = axis_setter(
        &GridSpec::nodes, [](const std::string& s) { return to_integer<int>(s); },
        "an integer node count");
    t["grid.extent"] = axis_setter(&GridSpec::extents, to_real,
                                   "a positive real extent");

    t["initial.profile"] = enum_setter<ProfileKind>(
        [](ExperimentConfig& c) -> ProfileKind& { return c.initial.kind; },
        kProfiles);
    t["initial.value"] = real_setter(
        [](ExperimentConfig& c) -> double& { return c.initial.value; });
    t["initial.amplitude"] = real_setter(
        [](ExperimentConfig& c) -> double& { return c.initial.amplitude; });
    t["initial.mode"] = int_setter(
        [](ExperimentConfig& c) -> int& { return c.initial.mode; });
    t["initial.width"] = real_setter(
        [](ExperimentConfig& c) -> double& { return c.initial.width; });
    t["initial.seed"] = [](ExperimentConfig& c, const std::string& v)
        -> std::optional<std::string> {
      const auto r = to_integer<std::uint64_t>(v);
      if (!r) return "expected a non-negative integer seed, got '" + v + "'";
      c.initial.seed = *r;
      return std::nullopt;
    };
    t["initial.path"] = [](ExperimentConfig& c, const std::string& v)
        -> std::optional<std::string> {
      if (v.empty()) return std::string("path must not be empty");
      c.initial.path = v;
      return std::nullopt;
    };

    t["scheme.tau"] = real_setter(
        [](ExperimentConfig& c) -> double& { return c.scheme.tau; });
    t["scheme.horizon"] = real_setter(
        [](ExperimentConfig& c) -> double& { return c.scheme.horizon; });
    t["scheme.coupling"] = enum_setter<RegCoupling::Kind>(
        [](ExperimentConfig& c) -> RegCoupling::Kind& {
          return c.scheme.coupling.kind;
        },
        kCouplings);
    t["scheme.eps"] = real_setter(
        [](ExperimentConfig& c) -> double& { return c.scheme.coupling.eps; });
    t["scheme.picard_tol"] = real_setter(
        [](ExperimentConfig& c) -> double& { return c.scheme.picard_tol; });
    t["scheme.picard_max_iter"] = int_setter(
        [](ExperimentConfig& c) -> int& { return c.scheme.picard_max_iter; });
    t["scheme.picard_damping"] = real_setter(
        [](ExperimentConfig& c) -> double& { return c.scheme.picard_damping; });
    t["scheme.picard_map"] = enum_setter<PicardMap>(
        [](ExperimentConfig& c) -> PicardMap& { return c.scheme.picard_map; },
        kPicardMaps);
    t["scheme.newton_fallback"] = bool_setter(
        [](ExperimentConfig& c) -> bool& { return c.scheme.newton_fallback; });
    t["scheme.sinh_arg_cap"] = real_setter(
        [](ExperimentConfig& c) -> double& { return c.scheme.sinh_arg_cap; });
    t["scheme.linear_backend"] = enum_setter<LinearBackend>(
        [](ExperimentConfig& c) -> LinearBackend& {
          return c.scheme.linear_backend;
        },
        kBackends);

    t["model.variant"] = enum_setter<VariantKind>(
        [](ExperimentConfig& c) -> VariantKind& { return c.variant.kind; },
        kVariants);
    t["model.K"] = real_setter(
        [](ExperimentConfig& c) -> double& { return c.variant.K; });
    t["model.normalized"] = bool_setter(
        [](ExperimentConfig& c) -> bool& { return c.variant.normalized; });
    t["model.p"] = real_setter(
        [](ExperimentConfig& c) -> double& { return c.variant.p; });

    t["output.directory"] = [](ExperimentConfig& c, const std::string& v)
        -> std::optional<std::string> {
      if (v.empty()) return std::string("directory must not be empty");
      c.output.directory = v;
      return std::nullopt;
    };
    t["output.snapshot_stride"] = int_setter(
        [](ExperimentConfig& c) -> int& { return c.output.snapshot_stride; });
    t["output.height"] = bool_setter(
        [](ExperimentConfig& c) -> bool& { return c.output.height; });
    t["output.reports"] = [](ExperimentConfig& c, const std::string& v)
        -> std::optional<std::string> {
      c.output.reports.clear();
      if (v == "default") return std::nullopt;
      for (const std::string& part : split_list(v)) {
        bool found = false;
        for (const auto& [n, k] : kReports) {
          if (n == part) {
            c.output.reports.push_back(k);
            found = true;
          }
        }
        if (!found) {
          return "unknown report '" + part +
                 "', expected prop31, prop32, prop33, p_energy or default";
        }
      }
      return std::nullopt;
    };
    return t;
  }();
  return table;
}

// Keys that only make sense for one profile / variant / coupling.
struct Applicability {
  std::string key;
  std::function<bool(const ExperimentConfig&)> applies;
  std::string rule;
};

const std::vector<Applicability>& applicability() {
  static const std::vector<Applicability> rules = {
      {"initial.value",
       [](const ExperimentConfig& c) { return c.initial.kind == ProfileKind::Constant; },
       "value applies only to profile = constant"},
      {"initial.amplitude",
       [](const ExperimentConfig& c) {
         return c.initial.kind == ProfileKind::Cosine ||
                c.initial.kind == ProfileKind::GaussianBump ||
                c.initial.kind == ProfileKind::RandomSmooth;
       },
       "amplitude applies only to cosine, gaussian_bump and random_smooth"},
      {"initial.mode",
       [](const ExperimentConfig& c) { return c.initial.kind == ProfileKind::Cosine; },
       "mode applies only to profile = cosine"},
      {"initial.width",
       [](const ExperimentConfig& c) {
         return c.initial.kind == ProfileKind::GaussianBump;
       },
       "width applies only to profile = gaussian_bump"},
      {"initial.seed",
       [](const ExperimentConfig& c) {
         return c.initial.kind == ProfileKind::RandomSmooth;
       },
       "seed applies only to profile = random_smooth"},
      {"initial.path",
       [](const ExperimentConfig& c) { return c.initial.kind == ProfileKind::Snapshot; },
       "path applies only to profile = snapshot (exactly one initial-condition "
       "source)"},
      {"scheme.eps",
       [](const ExperimentConfig& c) {
         return c.scheme.coupling.kind == RegCoupling::Kind::Decoupled;
       },
       "eps applies only to coupling = decoupled"},
      {"model.K",
       [](const ExperimentConfig& c) { return c.variant.kind == VariantKind::ScaledSinh; },
       "K applies only to variant = scaled_sinh"},
      {"model.normalized",
       [](const ExperimentConfig& c) { return c.variant.kind == VariantKind::ScaledSinh; },
       "normalized applies only to variant = scaled_sinh"},
      {"model.p",
       [](const ExperimentConfig& c) { return c.variant.kind == VariantKind::PExponent; },
       "p applies only to variant = p_exponent"},
  };
  return rules;
}

void check_invariants(const ExperimentConfig& c,
                      const std::map<std::string, int>& lines, Issues& out) {
  auto line_of = [&lines](const char* key) {
    const auto it = lines.find(key);
    return it == lines.end() ? 0 : it->second;
  };
  auto add = [&](const char* key, const std::string& msg) {
    out.push_back(at(line_of(key), msg));
  };

  const bool dim_ok = c.grid.dim == 1 || c.grid.dim == 2;
  if (!dim_ok) add("grid.dim", "grid.dim must be 1 or 2");
  for (int a = 0; a < (c.grid.dim == 2 ? 2 : 1); ++a) {
    if (c.grid.nodes[a] < 3) {
      add("grid.nodes", "grid.nodes must be >= 3 on every axis (axis " +
                            std::to_string(a) + " has " +
                            std::to_string(c.grid.nodes[a]) + ")");
    }
    if (!(c.grid.extents[a] > 0.0)) {
      add("grid.extent", "grid.extent must be positive on every axis");
    }
  }

  const InitialSpec& ic = c.initial;
  if (ic.kind == ProfileKind::RandomSmooth && !ic.seed) {
    add("initial.profile",
        "profile = random_smooth requires a seed (runs must be reproducible)");
  }
  if (ic.kind == ProfileKind::Snapshot && ic.path.empty()) {
    add("initial.profile", "profile = snapshot requires a path");
  }
  if (ic.kind == ProfileKind::Cosine && ic.mode < 0) {
    add("initial.mode", "mode must be >= 0");
  }
  if (ic.kind == ProfileKind::GaussianBump && !(ic.width > 0.0)) {
    add("initial.width", "width must be positive");
  }

  const SchemeParams& s = c.scheme;
  if (!(s.tau > 0.0)) add("scheme.tau", "tau must be positive");
  if (!(s.horizon > 0.0)) add("scheme.horizon", "horizon must be positive");
  if (s.tau > 0.0 && s.horizon > 0.0) {
    try {
      s.step_count();
    } catch (const Error& e) {
      add("scheme.tau", e.what());
    }
  }
  if (s.coupling.kind == RegCoupling::Kind::Decoupled &&
      !(s.coupling.eps > 0.0)) {
    add("scheme.coupling", "coupling = decoupled requires eps > 0");
  }
  if (!(s.picard_tol > 0.0)) add("scheme.picard_tol", "picard_tol must be positive");
  if (s.picard_max_iter < 1) {
    add("scheme.picard_max_iter", "picard_max_iter must be >= 1");
  }
  if (!(s.picard_damping > 0.0 && s.picard_damping <= 1.0)) {
    add("scheme.picard_damping", "picard_damping must lie in (0, 1]");
  }
  if (!(s.sinh_arg_cap > 0.0)) {
    add("scheme.sinh_arg_cap", "sinh_arg_cap must be positive");
  }

  const Variant& v = c.variant;
  if (v.kind == VariantKind::ScaledSinh && !(v.K > 0.0)) {
    add("model.K", "scaled_sinh requires K > 0");
  }
  if (v.kind == VariantKind::PExponent) {
    if (!(v.p >= 2.0)) add("model.p", "p_exponent requires p >= 2");
    if (c.grid.dim != 1) {
      add("model.variant",
          "variant = p_exponent requires dim = 1 (the p-exponent operator is "
          "one-dimensional)");
    }
    if (s.picard_map == PicardMap::Alternating) {
      add("scheme.picard_map",
          "picard_map = alternating is not available for p_exponent");
    }
  }

  if (c.output.snapshot_stride < 0) {
    add("output.snapshot_stride", "snapshot_stride must be >= 0");
  }
  if (c.output.height && c.grid.dim != 1) {
    add("output.height", "height reconstruction requires dim = 1");
  }
  for (ReportKind r : c.output.reports) {
    const bool p_report = r == ReportKind::PEnergy;
    if (p_report != v.uses_p_laplacian()) {
      add("output.reports",
          "report " + report_name(r) +
              (p_report ? " requires variant = p_exponent"
                        : " is not defined for variant = p_exponent"));
    }
  }
}

}  // namespace

void validate_config(const ExperimentConfig& cfg) {
  Issues issues;
  check_invariants(cfg, {}, issues);
  if (!issues.empty()) throw ConfigError(std::move(issues));
}

ExperimentConfig parse_config(std::string_view text) {
  static const std::set<std::string> kSections = {"grid", "initial", "scheme",
                                                  "model", "output"};
  Issues issues;
  std::vector<Entry> entries;
  std::map<std::string, int> lines;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view raw = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    const auto comment = raw.find_first_of("#;");
    const std::string_view line = trim(raw.substr(0, comment));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        issues.push_back(at(line_no, "malformed section header"));
        continue;
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!kSections.count(section)) {
        issues.push_back(at(line_no, "unknown section [" + section +
                                         "], expected grid, initial, scheme, "
                                         "model or output"));
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      issues.push_back(at(line_no, "expected key = value"));
      continue;
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (section.empty()) {
      issues.push_back(at(line_no, "key '" + key + "' outside any section"));
      continue;
    }
    const std::string full = section + "." + key;
    if (lines.count(full)) {
      issues.push_back(at(line_no, "duplicate key " + full + " (first set on line " +
                                       std::to_string(lines[full]) + ")"));
      continue;
    }
    lines[full] = line_no;
    entries.push_back({section, key, value, line_no});
  }

  ExperimentConfig cfg;
  for (const Entry& e : entries) {
    const std::string full = e.section + "." + e.key;
    const auto it = setters().find(full);
    if (it == setters().end()) {
      if (kSections.count(e.section)) {
        issues.push_back(at(e.line, "unknown key '" + e.key + "' in [" +
                                        e.section + "]"));
      }
      continue;
    }
    if (auto err = it->second(cfg, e.value)) {
      issues.push_back(at(e.line, full + ": " + *err));
    }
  }
  for (const Applicability& rule : applicability()) {
    const auto it = lines.find(rule.key);
    if (it != lines.end() && !rule.applies(cfg)) {
      issues.push_back(at(it->second, rule.rule));
    }
  }
  check_invariants(cfg, lines, issues);
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return cfg.canonical();
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string print_config(const ExperimentConfig& c) {
  std::ostringstream os;
  auto axes = [&c](auto arr, auto fmt) {
    std::string s = fmt(arr[0]);
    if (c.grid.dim == 2) s += "," + fmt(arr[1]);
    return s;
  };
  os << "[grid]\n"
     << "dim = " << c.grid.dim << '\n'
     << "nodes = " << axes(c.grid.nodes, [](int n) { return std::to_string(n); })
     << '\n'
     << "extent = " << axes(c.grid.extents, format_real) << "\n\n";

  const InitialSpec& ic = c.initial;
  os << "[initial]\n"
     << "profile = " << profile_name(ic.kind) << '\n';
  switch (ic.kind) {
    case ProfileKind::Constant:
      os << "value = " << format_real(ic.value) << '\n';
      break;
    case ProfileKind::Cosine:
      os << "amplitude = " << format_real(ic.amplitude) << '\n'
         << "mode = " << ic.mode << '\n';
      break;
    case ProfileKind::GaussianBump:
      os << "amplitude = " << format_real(ic.amplitude) << '\n'
         << "width = " << format_real(ic.width) << '\n';
      break;
    case ProfileKind::RandomSmooth:
      os << "amplitude = " << format_real(ic.amplitude) << '\n';
      if (ic.seed) os << "seed = " << *ic.seed << '\n';
      break;
    case ProfileKind::Snapshot:
      os << "path = " << ic.path << '\n';
      break;
  }

  const SchemeParams& s = c.scheme;
  os << "\n[scheme]\n"
     << "tau = " << format_real(s.tau) << '\n'
     << "horizon = " << format_real(s.horizon) << '\n'
     << "coupling = " << name_of(kCouplings, s.coupling.kind) << '\n';
  if (s.coupling.kind == RegCoupling::Kind::Decoupled) {
    os << "eps = " << format_real(s.coupling.eps) << '\n';
  }
  os << "picard_tol = " << format_real(s.picard_tol) << '\n'
     << "picard_max_iter = " << s.picard_max_iter << '\n'
     << "picard_damping = " << format_real(s.picard_damping) << '\n'
     << "picard_map = " << name_of(kPicardMaps, s.picard_map) << '\n'
     << "newton_fallback = " << (s.newton_fallback ? "true" : "false") << '\n'
     << "sinh_arg_cap = " << format_real(s.sinh_arg_cap) << '\n'
     << "linear_backend = " << name_of(kBackends, s.linear_backend) << '\n';

  os << "\n[model]\n"
     << "variant = " << name_of(kVariants, c.variant.kind) << '\n';
  if (c.variant.kind == VariantKind::ScaledSinh) {
    os << "K = " << format_real(c.variant.K) << '\n'
       << "normalized = " << (c.variant.normalized ? "true" : "false") << '\n';
  }
  if (c.variant.kind == VariantKind::PExponent) {
    os << "p = " << format_real(c.variant.p) << '\n';
  }

  std::vector<std::string> reports;
  for (ReportKind r : c.output.reports) reports.push_back(report_name(r));
  os << "\n[output]\n"
     << "directory = " << c.output.directory << '\n'
     << "snapshot_stride = " << c.output.snapshot_stride << '\n'
     << "height = " << (c.output.height ? "true" : "false") << '\n'
     << "reports = " << (reports.empty() ? "default" : join(reports, ","))
     << '\n';
  return os.str();
}

}  // namespace crystalflow
