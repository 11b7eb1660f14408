#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "streamsvm/error.hpp"
#include "streamsvm/model.hpp"
#include "streamsvm/number_text.hpp"

namespace streamsvm::model {

namespace {

constexpr std::string_view kMagic = "streamsvm-model";
constexpr std::string_view kHeader = "streamsvm-model v1";

void put(std::string& out, std::string_view key, const std::string& value) {
  out += key;
  out += '=';
  out += value;
  out += '\n';
}

void put_common(std::string& out, std::string_view kind, double C, double R, double s2, std::int64_t M) {
  out += kHeader;
  out += '\n';
  put(out, "kind", std::string(kind));
  put(out, "C", format_real(C));
  put(out, "R", format_real(R));
  put(out, "s2", format_real(s2));
  put(out, "M", std::to_string(M));
}

void put_sparse(std::string& out, const data::SparseVector& x) {
  for (const auto& f : x) {
    out += ' ';
    out += std::to_string(f.index);
    out += ':';
    out += format_real(f.value);
  }
}

// Sequential reader over "key=value" lines.
class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  // Next non-blank line, or nullopt at the end.
  std::optional<std::string_view> line() {
    while (!text_.empty()) {
      const auto nl = text_.find('\n');
      std::string_view l = text_.substr(0, nl);
      text_ = nl == std::string_view::npos ? std::string_view{} : text_.substr(nl + 1);
      ++line_no_;
      if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
      if (!l.empty()) return l;
    }
    return std::nullopt;
  }

  std::string_view field(std::string_view key) {
    const auto l = line();
    if (!l) fail("missing field '" + std::string(key) + "'");
    const auto eq = l->find('=');
    if (eq == std::string_view::npos || l->substr(0, eq) != key) {
      fail("expected field '" + std::string(key) + "', got '" + std::string(*l) + "'");
    }
    return l->substr(eq + 1);
  }

  double real(std::string_view key) { return to_real(field(key), key); }

  double to_real(std::string_view tok, std::string_view key) {
    if (const auto v = parse_real(tok)) return *v;
    // Distinguish non-finite spellings for a clearer message.
    std::string lower(tok);
    for (auto& ch : lower) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (lower.find("nan") != std::string::npos || lower.find("inf") != std::string::npos) {
      fail("non-finite value for '" + std::string(key) + "'");
    }
    fail("malformed value for '" + std::string(key) + "': '" + std::string(tok) + "'");
  }

  std::int64_t integer(std::string_view key) {
    const auto tok = field(key);
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
      fail("malformed integer for '" + std::string(key) + "': '" + std::string(tok) + "'");
    }
    return v;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_no_, what); }
  std::size_t line_no() const { return line_no_; }

 private:
  std::string_view text_;
  std::size_t line_no_ = 0;
};

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    const std::size_t start = pos;
    while (pos < s.size() && s[pos] != ' ' && s[pos] != '\t') ++pos;
    if (pos > start) out.push_back(s.substr(start, pos - start));
  }
  return out;
}

struct Common {
  double C, R, s2;
  std::int64_t M;
};

Common read_common(Reader& r) {
  Common c{};
  c.C = r.real("C");
  if (!(c.C > 0.0)) r.fail("invariant violation: C must be positive");
  c.R = r.real("R");
  if (c.R < 0.0) r.fail("invariant violation: negative radius");
  c.s2 = r.real("s2");
  if (c.s2 < 0.0) r.fail("invariant violation: negative s2");
  c.M = r.integer("M");
  if (c.M < 1) r.fail("invariant violation: M must be at least 1");
  return c;
}

}  // namespace

std::string serialize_model(const LinearModel& m) {
  std::string out;
  put_common(out, "linear", m.C, m.R, m.s2, m.M);
  put(out, "dim", std::to_string(m.w.size()));
  out += "w=";
  for (std::size_t i = 0; i < m.w.size(); ++i) {
    if (i) out += ' ';
    out += format_real(m.w[i]);
  }
  out += '\n';
  return out;
}

std::string serialize_model(const KernelModel& m) {
  std::string out;
  put_common(out, "kernel", m.C, m.R, m.s2, m.M);
  put(out, "kernel", m.kernel.to_string());
  put(out, "wnorm2", format_real(m.center_norm2));
  put(out, "nsv", std::to_string(m.support.size()));
  for (const auto& sv : m.support) {
    out += "sv=";
    out += format_real(sv.alpha);
    put_sparse(out, sv.x);
    out += '\n';
  }
  return out;
}

std::string serialize_model(const AnyModel& m) {
  return std::visit([](const auto& v) { return serialize_model(v); }, m);
}

AnyModel deserialize_model(std::string_view text) {
  Reader r(text);
  const auto header = r.line();
  if (!header) throw ParseError(1, "empty model file");
  if (*header != kHeader) {
    if (header->starts_with(kMagic)) r.fail("version mismatch: expected '" + std::string(kHeader) + "'");
    r.fail("not a streamsvm model file");
  }
  const auto kind = r.field("kind");
  if (kind == "linear") {
    const Common c = read_common(r);
    const std::int64_t dim = r.integer("dim");
    if (dim < 0) r.fail("invariant violation: negative dim");
    const auto toks = split_ws(r.field("w"));
    if (toks.size() != static_cast<std::size_t>(dim)) {
      r.fail("w has " + std::to_string(toks.size()) + " entries, expected " + std::to_string(dim));
    }
    LinearModel m;
    m.C = c.C;
    m.R = c.R;
    m.s2 = c.s2;
    m.M = c.M;
    m.w.reserve(toks.size());
    for (auto t : toks) m.w.push_back(r.to_real(t, "w"));
    if (r.line()) r.fail("unexpected trailing content");
    return m;
  }
  if (kind == "kernel") {
    const Common c = read_common(r);
    KernelModel m;
    m.C = c.C;
    m.R = c.R;
    m.s2 = c.s2;
    m.M = c.M;
    try {
      m.kernel = KernelSpec::parse(r.field("kernel"));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      r.fail(e.what());
    }
    m.center_norm2 = r.real("wnorm2");
    const std::int64_t nsv = r.integer("nsv");
    if (nsv < 0) r.fail("invariant violation: negative nsv");
    for (std::int64_t k = 0; k < nsv; ++k) {
      const auto toks = split_ws(r.field("sv"));
      if (toks.empty()) r.fail("support vector without coefficient");
      SupportVector sv;
      sv.alpha = r.to_real(toks[0], "sv");
      for (std::size_t i = 1; i < toks.size(); ++i) {
        const auto colon = toks[i].find(':');
        if (colon == std::string_view::npos) r.fail("malformed feature '" + std::string(toks[i]) + "'");
        std::uint32_t idx = 0;
        const auto it = toks[i].substr(0, colon);
        const auto [ptr, ec] = std::from_chars(it.data(), it.data() + it.size(), idx);
        if (ec != std::errc() || ptr != it.data() + it.size() || idx == 0) {
          r.fail("invalid feature index '" + std::string(it) + "'");
        }
        if (!sv.x.empty() && idx <= sv.x.back().index) r.fail("feature indices must be strictly increasing");
        sv.x.push_back({idx, r.to_real(toks[i].substr(colon + 1), "sv")});
      }
      m.support.push_back(std::move(sv));
    }
    if (r.line()) r.fail("unexpected trailing content");
    return m;
  }
  r.fail("unknown model kind '" + std::string(kind) + "'");
}

void save_model(const std::string& path, const AnyModel& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << serialize_model(m);
  if (!out) throw Error("write failed for '" + path + "'");
}

AnyModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_model(buf.str());
}

}  // namespace streamsvm::model
