#include "nnst/io.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "nnst/error.hpp"
#include "nnst/spectral.hpp"

namespace nnst {

namespace {

constexpr std::array<std::string_view, 22> kKeys{
    "grid.d",         "grid.n",        "fluid.p",         "fluid.q",     "fluid.sigma",      "fluid.gamma",
    "fluid.nu_star",  "fluid.nu_max",  "fluid.delta",     "fluid.g",     "viscosity.kind",   "viscosity.table",
    "init.kind",      "init.params",   "smoothing.n",     "scheme.kind", "scheme.cfl",       "time.T",
    "time.output_every", "penalty.N",  "penalty.k",       "seed"};

constexpr std::array<std::string_view, 6> kRequired{"grid.d", "grid.n", "fluid.p", "fluid.q", "init.kind", "time.T"};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

struct Entry {
  std::string value;
  int line = 0;
};

/// Accumulates every problem so the caller sees them all at once.
class Problems {
 public:
  void add(ErrorKind kind, int line, const std::string& msg) {
    if (!first_) first_ = kind;
    if (!text_.empty()) text_ += '\n';
    text_ += line > 0 ? "line " + std::to_string(line) + ": " + msg : msg;
  }
  bool empty() const { return !first_; }
  [[noreturn]] void raise() const { fail(*first_, text_); }

 private:
  std::optional<ErrorKind> first_;
  std::string text_;
};

std::optional<double> to_double(std::string_view s, bool allow_inf) {
  if (allow_inf && (s == "inf" || s == "infinity")) return kInfinity;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

template <class Int>
std::optional<Int> to_integer(std::string_view s) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

class Reader {
 public:
  Reader(const std::map<std::string, Entry>& entries, Problems& problems) : entries_(entries), problems_(problems) {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  std::optional<double> number(const std::string& key, bool allow_inf = false) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    auto v = to_double(it->second.value, allow_inf);
    if (!v) bad(key, "expected a decimal number, got '" + it->second.value + "'");
    return v;
  }

  template <class Int>
  std::optional<Int> integer(const std::string& key) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    auto v = to_integer<Int>(it->second.value);
    if (!v) bad(key, "expected an integer, got '" + it->second.value + "'");
    return v;
  }

  std::optional<std::vector<double>> list(const std::string& key) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    std::vector<double> out;
    for (std::string_view item : split(it->second.value, ',')) {
      auto v = to_double(item, false);
      if (!v) {
        bad(key, "expected comma-separated numbers, got '" + it->second.value + "'");
        return std::nullopt;
      }
      out.push_back(*v);
    }
    return out;
  }

  std::optional<std::string> text(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second.value;
  }

  void bad(const std::string& key, const std::string& msg) {
    const auto it = entries_.find(key);
    problems_.add(ErrorKind::BadValue, it == entries_.end() ? 0 : it->second.line, key + ": " + msg);
  }

 private:
  const std::map<std::string, Entry>& entries_;
  Problems& problems_;
};

/// "r0:nu0, r1:nu1, ..."
std::optional<std::vector<std::pair<double, double>>> parse_table(std::string_view s) {
  std::vector<std::pair<double, double>> pts;
  for (std::string_view item : split(s, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() != 2) return std::nullopt;
    const auto r = to_double(parts[0], false);
    const auto v = to_double(parts[1], false);
    if (!r || !v) return std::nullopt;
    pts.emplace_back(*r, *v);
  }
  return pts;
}

template <class Fn>
void guarded(Problems& problems, int line, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    problems.add(ErrorKind::BadValue, line, e.detail());
  }
}

}  // namespace

std::span<const std::string_view> config_keys() { return kKeys; }

SimulationConfig parse_config(std::string_view text, bool force) {
  Problems problems;
  std::map<std::string, Entry> entries;
  std::string section;
  int line_no = 0;
  for (std::string_view raw : split(text, '\n')) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        problems.add(ErrorKind::BadValue, line_no, "malformed section header '" + std::string(line) + "'");
        continue;
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      problems.add(ErrorKind::BadValue, line_no, "expected 'key = value', got '" + std::string(line) + "'");
      continue;
    }
    const std::string local(trim(line.substr(0, eq)));
    const std::string key = section.empty() ? local : section + "." + local;
    const std::string value(trim(line.substr(eq + 1)));
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
      problems.add(ErrorKind::UnknownKey, line_no, "unknown key '" + key + "'");
      continue;
    }
    if (value.empty()) {
      problems.add(ErrorKind::BadValue, line_no, key + ": empty value");
      continue;
    }
    if (const auto it = entries.find(key); it != entries.end()) {
      problems.add(ErrorKind::BadValue, line_no,
                   "duplicate key '" + key + "' (first set on line " + std::to_string(it->second.line) + ")");
      continue;
    }
    entries.emplace(key, Entry{value, line_no});
  }
  for (std::string_view key : kRequired)
    if (!entries.count(std::string(key))) problems.add(ErrorKind::MissingRequired, 0, "missing required key '" + std::string(key) + "'");
  if (entries.count("penalty.N") != entries.count("penalty.k"))
    problems.add(ErrorKind::MissingRequired, 0, "penalty.N and penalty.k must be given together");
  if (!problems.empty()) problems.raise();

  Reader in(entries, problems);
  SimulationConfig cfg;

  const int d = in.integer<int>("grid.d").value_or(2);
  const int n = in.integer<int>("grid.n").value_or(8);
  auto line_of = [&](const char* key) { return entries.count(key) ? entries.at(key).line : 0; };
  bool grid_ok = false;
  guarded(problems, line_of("grid.n"), [&] {
    cfg.grid = TorusGrid(d, n);
    grid_ok = true;
  });
  if (!problems.empty()) problems.raise();

  FluidParams fp = FluidParams::newtonian(d);
  fp.p = in.number("fluid.p").value_or(2.0);
  fp.q = in.number("fluid.q").value_or(1.5);
  fp.sigma = in.number("fluid.sigma", true).value_or(kInfinity);
  fp.gamma = in.number("fluid.gamma").value_or(0.0);
  fp.nu_star = in.number("fluid.nu_star").value_or(1.0);
  fp.nu_max = in.number("fluid.nu_max").value_or(std::max(1.0, fp.nu_star));
  fp.delta = in.number("fluid.delta").value_or(0.0);
  if (auto g = in.list("fluid.g")) {
    if (static_cast<int>(g->size()) != d)
      in.bad("fluid.g", "needs " + std::to_string(d) + " components, got " + std::to_string(g->size()));
    else
      fp.g = *g;
  }
  if (problems.empty()) guarded(problems, 0, [&] { fp.validate(); });
  cfg.params = fp;

  const std::string visc = in.text("viscosity.kind").value_or("constant");
  guarded(problems, line_of("viscosity.kind"), [&] {
    if (visc == "constant") {
      cfg.law = ViscosityLaw::constant(fp.nu_star);
    } else if (visc == "power") {
      cfg.law = ViscosityLaw::power(fp.nu_star, fp.gamma);
    } else if (visc == "bounded_power") {
      cfg.law = ViscosityLaw::bounded_power(fp.nu_star, fp.gamma, fp.nu_max);
    } else if (visc == "user_table") {
      const auto table_text = in.text("viscosity.table");
      if (!table_text) fail(ErrorKind::BadValue, "viscosity.kind = user_table needs viscosity.table");
      const auto pts = parse_table(*table_text);
      if (!pts) fail(ErrorKind::BadValue, "viscosity.table must read 'r0:nu0, r1:nu1, ...'");
      cfg.law = ViscosityLaw::user_table(*pts);
    } else {
      fail(ErrorKind::BadValue, "viscosity.kind must be constant, power, bounded_power or user_table, got '" + visc + "'");
    }
  });
  if (entries.count("viscosity.table") && visc != "user_table")
    in.bad("viscosity.table", "only used with viscosity.kind = user_table");

  cfg.init.kind = in.text("init.kind").value_or("constant");
  static const std::array<std::string_view, 6> kInitKinds{"constant", "sine", "stratified", "random", "rough", "snapshot"};
  if (std::find(kInitKinds.begin(), kInitKinds.end(), cfg.init.kind) == kInitKinds.end()) {
    in.bad("init.kind", "must be one of constant, sine, stratified, random, rough, snapshot");
  } else if (cfg.init.kind == "snapshot") {
    if (auto path = in.text("init.params"))
      cfg.init.path = *path;
    else
      problems.add(ErrorKind::MissingRequired, line_of("init.kind"), "init.kind = snapshot needs init.params = <path>");
  } else if (auto params = in.list("init.params")) {
    cfg.init.params = *params;
    const std::size_t want = cfg.init.kind == "constant" ? 1 : 3;
    if (params->size() != want)
      in.bad("init.params", "init.kind = " + cfg.init.kind + " takes " + std::to_string(want) + " values");
  } else if (!entries.count("init.params")) {
    problems.add(ErrorKind::MissingRequired, line_of("init.kind"), "init.kind = " + cfg.init.kind + " needs init.params");
  }

  if (grid_ok) cfg.smoothing_n = DyadicCutoff::max_block(n);
  if (auto s = in.integer<int>("smoothing.n")) cfg.smoothing_n = *s;

  if (auto kind = in.text("scheme.kind")) guarded(problems, line_of("scheme.kind"), [&] {
      cfg.scheme.kind = parse_scheme_kind(*kind);
    });
  if (auto cfl = in.number("scheme.cfl")) {
    if (!(*cfl > 0.0 && *cfl <= 1.0))
      in.bad("scheme.cfl", "must lie in (0, 1]");
    else
      cfg.scheme.cfl_target = *cfl;
  }

  if (auto T = in.number("time.T")) {
    if (!(*T > 0.0)) in.bad("time.T", "must be > 0");
    cfg.T_final = *T;
  }
  cfg.output_every = cfg.T_final;
  if (auto every = in.number("time.output_every")) {
    if (!(*every > 0.0)) in.bad("time.output_every", "must be > 0");
    cfg.output_every = *every;
  }

  if (entries.count("penalty.N")) {
    const auto N = in.number("penalty.N");
    const auto k = in.integer<int>("penalty.k");
    if (N && k) {
      if (!(*N > 0.0)) in.bad("penalty.N", "must be > 0");
      if (!(*k > 1.0 + 0.5 * d)) in.bad("penalty.k", "must exceed 1 + d/2");
      cfg.penalty = Penalty{*N, *k};
    }
  }
  if (auto seed = in.integer<std::uint64_t>("seed")) cfg.seed = *seed;

  if (!problems.empty()) problems.raise();

  cfg.forced = force;
  cfg.exponents = classify_exponents(cfg.params);
  if (cfg.exponents.cls == ExponentClass::Inadmissible && !force) {
    std::ostringstream msg;
    msg << "exponents are inadmissible (Q = " << cfg.exponents.Q
        << (cfg.exponents.q_condition ? "" : ", q < 2d/(d+2)") << "); pass --force to run anyway";
    fail(ErrorKind::InadmissibleExponents, msg.str());
  }
  return cfg;
}

SimulationConfig load_config(const std::filesystem::path& path, bool force) {
  return parse_config(read_text_file(path), force);
}

// --- diagnostics CSV -------------------------------------------------------------

namespace {

constexpr std::string_view kHeader = "t,lq_norm,l2_norm,recip_norm,du_beta,dissipation,work,energy_residual,iters";

void append_number(std::string& out, double v) {
  if (std::isinf(v)) {
    out += v > 0 ? "inf" : "-inf";
    return;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

}  // namespace

std::string write_diagnostics(const DiagnosticsSeries& series) {
  std::string out(kHeader);
  out += '\n';
  for (const auto& r : series) {
    for (double v : {r.t, r.lq_norm, r.l2_norm, r.recip_norm, r.du_beta, r.dissipation, r.work, r.energy_residual}) {
      append_number(out, v);
      out += ',';
    }
    out += std::to_string(r.iters);
    out += '\n';
  }
  return out;
}

DiagnosticsSeries parse_diagnostics(std::string_view csv) {
  auto lines = split(csv, '\n');
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || lines.front() != kHeader) fail(ErrorKind::BadValue, "diagnostics CSV header mismatch");
  DiagnosticsSeries series;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split(lines[i], ',');
    if (fields.size() != 9) fail(ErrorKind::BadValue, "diagnostics row " + std::to_string(i) + " needs 9 fields");
    std::array<double, 8> v{};
    for (std::size_t c = 0; c < 8; ++c) {
      const std::string_view f = fields[c];
      if (f == "inf") {
        v[c] = kInfinity;
      } else if (f == "-inf") {
        v[c] = -kInfinity;
      } else {
        const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v[c]);
        if (ec != std::errc{} || ptr != f.data() + f.size())
          fail(ErrorKind::BadValue, "diagnostics row " + std::to_string(i) + ": bad number '" + std::string(f) + "'");
      }
    }
    const auto iters = to_integer<int>(fields[8]);
    if (!iters) fail(ErrorKind::BadValue, "diagnostics row " + std::to_string(i) + ": bad iteration count");
    series.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], *iters});
  }
  return series;
}

// --- snapshots -----------------------------------------------------------------

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<std::uint8_t, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.insert(out.end(), bytes.begin(), bytes.end());
}

template <class T>
T get_le(std::span<const std::uint8_t> in, std::size_t offset) {
  std::array<std::uint8_t, sizeof(T)> bytes;
  std::copy_n(in.begin() + static_cast<std::ptrdiff_t>(offset), sizeof(T), bytes.begin());
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

constexpr std::size_t kHeaderBytes = 4 + 2 + 2 + 4 + 8;

std::uint32_t crc_of(std::span<const std::uint8_t> payload) {
  uLong crc = crc32(0L, Z_NULL, 0);
  std::size_t done = 0;
  while (done < payload.size()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(payload.size() - done, 1u << 30));
    crc = crc32(crc, payload.data() + done, chunk);
    done += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

std::vector<std::uint8_t> encode_snapshot(const Snapshot& snap) {
  const TorusGrid& g = snap.rho.grid;
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + 8 * g.size() + 4);
  for (char c : std::string_view("NNST")) out.push_back(static_cast<std::uint8_t>(c));
  put_le<std::uint16_t>(out, kSnapshotVersion);
  put_le<std::uint16_t>(out, static_cast<std::uint16_t>(g.dim()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.n()));
  put_le<double>(out, snap.time);
  for (double v : snap.rho.values) put_le<double>(out, v);
  const std::uint32_t crc = crc_of(std::span(out).subspan(kHeaderBytes));
  put_le<std::uint32_t>(out, crc);
  return out;
}

Snapshot decode_snapshot(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes + 4) fail(ErrorKind::CorruptSnapshot, "file too short for a snapshot header");
  if (!std::equal(bytes.begin(), bytes.begin() + 4, "NNST")) fail(ErrorKind::CorruptSnapshot, "bad magic");
  const auto version = get_le<std::uint16_t>(bytes, 4);
  if (version != kSnapshotVersion)
    fail(ErrorKind::CorruptSnapshot, "unsupported snapshot version " + std::to_string(version));
  const auto d = get_le<std::uint16_t>(bytes, 6);
  const auto n = get_le<std::uint32_t>(bytes, 8);
  const double time = get_le<double>(bytes, 12);
  std::optional<TorusGrid> grid;
  try {
    grid.emplace(d, static_cast<int>(n));
  } catch (const Error& e) {
    fail(ErrorKind::CorruptSnapshot, std::string("bad grid in header: ") + e.detail());
  }
  const std::size_t payload_bytes = 8 * grid->size();
  if (bytes.size() != kHeaderBytes + payload_bytes + 4)
    fail(ErrorKind::CorruptSnapshot, "payload length does not match d = " + std::to_string(d) + ", n = " + std::to_string(n));
  const auto payload = bytes.subspan(kHeaderBytes, payload_bytes);
  if (crc_of(payload) != get_le<std::uint32_t>(bytes, kHeaderBytes + payload_bytes))
    fail(ErrorKind::CorruptSnapshot, "CRC mismatch");
  std::vector<double> values(grid->size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = get_le<double>(payload, 8 * i);
  return Snapshot{time, GridField(*grid, std::move(values))};
}

void write_snapshot(const std::filesystem::path& path, const Snapshot& snap) {
  const auto bytes = encode_snapshot(snap);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) fail(ErrorKind::Io, "write to '" + path.string() + "' failed");
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::Io, "cannot open snapshot '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return decode_snapshot(bytes);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorKind::Io, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  f << text;
  if (!f) fail(ErrorKind::Io, "write to '" + path.string() + "' failed");
}

}  // namespace nnst
