#include "szymrel/relation.hpp"

#include <algorithm>
#include <cctype>
#include <mutex>
#include <sstream>
#include <unordered_map>

namespace szymrel {

namespace {

int check_dim(int v) {
  if (v < 0) throw DimensionError("negative dimension");
  return v;
}

void check_square(const Hom& m) {
  if (m.n_src() != m.n_dst()) {
    throw DimensionError("expected a square relation, got " +
                         std::to_string(m.n_src()) + "x" +
                         std::to_string(m.n_dst()));
  }
}

size_t hash_words(const Hom& m) {
  // FNV-1a over the row words plus the dimensions.
  uint64_t h = 1469598103934665603ull;
  auto mix = [&h](uint64_t v) {
    h ^= v;
    h *= 1099511628211ull;
  };
  mix(static_cast<uint64_t>(m.n_src()) << 32 | static_cast<uint32_t>(m.n_dst()));
  for (int i = 0; i < m.n_src(); ++i) {
    for (uint64_t w : m.row(i).words()) mix(w);
  }
  return static_cast<size_t>(h);
}

}  // namespace

namespace detail {

// Power sequence cache: powers[e-1] holds the e-th power. Once the sequence
// revisits an earlier value (index, cycle) any exponent reduces into the
// stored prefix, so the vector never grows past index + cycle - 1.
struct PowerMemo {
  std::mutex mu;
  std::vector<Rel> powers;
  std::unordered_map<Rel, uint64_t, RelHash> seen;  // value -> exponent
  uint64_t index = 0;      // 0 while the repeat is undiscovered
  uint64_t cycle = 0;
};

struct MemoAccess {
  static PowerMemo& memo(const Rel& r) { return *r.memo_; }
};

}  // namespace detail

Hom::Hom(int n_src, int n_dst)
    : n_src_(check_dim(n_src)),
      n_dst_(check_dim(n_dst)),
      rows_(static_cast<size_t>(n_src), Bitset(n_dst)) {}

Hom Hom::identity(int n) {
  Hom m(n, n);
  for (int i = 0; i < n; ++i) m.set(i, i);
  return m;
}

Hom Hom::full(int n_src, int n_dst) {
  Hom m(n_src, n_dst);
  for (int i = 0; i < n_src; ++i) m.rows_[i] = Bitset::full(n_dst);
  return m;
}

void Hom::set_row(int i, Bitset row) {
  if (row.size() != n_dst_) throw DimensionError("set_row: width mismatch");
  rows_[i] = std::move(row);
}

Bitset Hom::column(int j) const {
  Bitset c(n_src_);
  for (int i = 0; i < n_src_; ++i) {
    if (rows_[i].test(j)) c.set(i);
  }
  return c;
}

Rel::Rel(int n) : m_(n, n), memo_(std::make_shared<detail::PowerMemo>()) {}

Rel::Rel(Hom m) : m_(std::move(m)), memo_(std::make_shared<detail::PowerMemo>()) {
  check_square(m_);
}

Rel Rel::identity(int n) { return Rel(Hom::identity(n)); }

Rel Rel::full(int n) { return Rel(Hom::full(n, n)); }

Rel Rel::from_pairs(int n, std::initializer_list<std::pair<int, int>> pairs) {
  Rel r(n);
  for (auto [i, j] : pairs) r.set(i, j);
  return r;
}

void Rel::set(int i, int j, bool v) {
  // The memo may be shared with copies of the pre-mutation value.
  memo_ = std::make_shared<detail::PowerMemo>();
  m_.set(i, j, v);
}

size_t RelHash::operator()(const Rel& r) const { return hash_words(r.hom()); }

Hom compose(const Hom& f, const Hom& g) {
  if (f.n_dst() != g.n_src()) {
    throw DimensionError("compose: inner dimensions differ (" +
                         std::to_string(f.n_dst()) + " vs " +
                         std::to_string(g.n_src()) + ")");
  }
  Hom out(f.n_src(), g.n_dst());
  for (int i = 0; i < f.n_src(); ++i) {
    Bitset acc(g.n_dst());
    const Bitset& fr = f.row(i);
    for (int j = fr.find_first(); j != -1; j = fr.find_next(j)) {
      acc |= g.row(j);
    }
    out.set_row(i, acc);
  }
  return out;
}

Rel compose(const Rel& a, const Rel& b) {
  if (a.size() != b.size()) throw DimensionError("compose: sizes differ");
  return Rel(compose(a.hom(), b.hom()));
}

Hom inverse(const Hom& f) {
  Hom out(f.n_dst(), f.n_src());
  for (int i = 0; i < f.n_src(); ++i) {
    const Bitset& r = f.row(i);
    for (int j = r.find_first(); j != -1; j = r.find_next(j)) out.set(j, i);
  }
  return out;
}

Rel inverse(const Rel& r) { return Rel(inverse(r.hom())); }

Rel power(const Rel& r, uint64_t k) {
  if (k == 0) return Rel::identity(r.size());
  auto& memo = detail::MemoAccess::memo(r);
  std::scoped_lock lock(memo.mu);
  if (memo.powers.empty()) {
    memo.powers.push_back(r);
    memo.seen.emplace(r, 1);
  }
  while (memo.index == 0 && memo.powers.size() < k) {
    Rel next = compose(memo.powers.back(), r);
    auto [it, fresh] = memo.seen.emplace(next, memo.powers.size() + 1);
    if (!fresh) {
      memo.index = it->second;
      memo.cycle = memo.powers.size() + 1 - it->second;
      break;
    }
    memo.powers.push_back(std::move(next));
  }
  if (k <= memo.powers.size()) return memo.powers[k - 1];
  // Sequence has entered its cycle; reduce the exponent into it.
  uint64_t e = memo.index + (k - memo.index) % memo.cycle;
  return memo.powers[e - 1];
}

Bitset dom(const Hom& f) {
  Bitset d(f.n_src());
  for (int i = 0; i < f.n_src(); ++i) {
    if (f.row(i).any()) d.set(i);
  }
  return d;
}

Bitset im(const Hom& f) {
  Bitset acc(f.n_dst());
  for (int i = 0; i < f.n_src(); ++i) acc |= f.row(i);
  return acc;
}

GrandParts gparts(const Rel& r) {
  const int n = r.size();
  auto pre = [&](const Bitset& s) {
    Bitset out(n);
    for (int i = 0; i < n; ++i) {
      if (r.row(i).intersects(s)) out.set(i);
    }
    return out;
  };
  auto post = [&](const Bitset& s) {
    Bitset out(n);
    for (int i = s.find_first(); i != -1; i = s.find_next(i)) out |= r.row(i);
    return out;
  };
  Bitset d = dom(r.hom());
  Bitset i = im(r.hom());
  uint64_t k = 1;
  while (true) {
    Bitset d2 = pre(d);
    Bitset i2 = post(i);
    if (d2 == d && i2 == i) break;
    d = std::move(d2);
    i = std::move(i2);
    ++k;
  }
  GrandParts g{d, i, d, k};
  g.inv &= g.gim;
  return g;
}

HomFlags classify_relation(const Hom& f) {
  HomFlags out{};
  out.is_partial_map = true;
  for (int i = 0; i < f.n_src(); ++i) {
    if (f.row(i).count() > 1) {
      out.is_partial_map = false;
      break;
    }
  }
  out.is_map = out.is_partial_map && dom(f) == Bitset::full(f.n_src());
  out.is_injective = true;
  for (int j = 0; j < f.n_dst(); ++j) {
    if (f.column(j).count() > 1) {
      out.is_injective = false;
      break;
    }
  }
  out.is_surjective = im(f) == Bitset::full(f.n_dst());
  out.is_bijection = out.is_map && out.is_injective && out.is_surjective;
  return out;
}

RelFlags classify_relation(const Rel& r) {
  RelFlags out{};
  static_cast<HomFlags&>(out) = classify_relation(r.hom());
  out.is_wide = gparts(r).inv == Bitset::full(r.size());
  return out;
}

Restriction restrict_to(const Rel& r, const std::vector<int>& subset) {
  const int m = static_cast<int>(subset.size());
  for (int v : subset) {
    if (v < 0 || v >= r.size()) {
      throw DimensionError("restrict_to: vertex out of range");
    }
  }
  Rel out(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (r.at(subset[i], subset[j])) out.set(i, j);
    }
  }
  return Restriction{std::move(out), subset};
}

Restriction restrict_to(const Rel& r, const Bitset& subset) {
  return restrict_to(r, subset.to_vector());
}

std::optional<BlockStructure> block_bijection(const Rel& r) {
  const int n = r.size();
  // Blocks are groups of vertices with identical rows; every row must be the
  // member set of exactly one block, hit by exactly one block.
  std::vector<Bitset> member_mask;
  std::vector<std::vector<int>> blocks;
  std::vector<int> block_of(n, -1);
  for (int v = 0; v < n; ++v) {
    if (block_of[v] != -1) continue;
    if (r.row(v).none()) return std::nullopt;
    Bitset members(n);
    for (int u = 0; u < n; ++u) {
      if (r.row(u) == r.row(v)) members.set(u);
    }
    int b = static_cast<int>(blocks.size());
    blocks.push_back(members.to_vector());
    member_mask.push_back(members);
    for (int u : blocks.back()) block_of[u] = b;
  }
  std::vector<int> image(blocks.size(), -1);
  std::vector<char> hit(blocks.size(), 0);
  for (size_t b = 0; b < blocks.size(); ++b) {
    const Bitset& target = r.row(blocks[b][0]);
    int t = -1;
    for (size_t c = 0; c < blocks.size(); ++c) {
      if (member_mask[c] == target) {
        t = static_cast<int>(c);
        break;
      }
    }
    if (t == -1 || hit[t]) return std::nullopt;
    hit[t] = 1;
    image[b] = t;
  }
  return BlockStructure{std::move(blocks), std::move(image)};
}

Rel relabel(const Rel& r, const std::vector<int>& f) {
  if (static_cast<int>(f.size()) != r.size()) {
    throw DimensionError("relabel: bijection size mismatch");
  }
  Rel out(r.size());
  for (int i = 0; i < r.size(); ++i) {
    for (int j = 0; j < r.size(); ++j) {
      if (r.at(i, j)) out.set(f[i], f[j]);
    }
  }
  return out;
}

Rel block_relation(const BlockStructure& bs, int n) {
  Rel r(n);
  for (size_t b = 0; b < bs.blocks.size(); ++b) {
    for (int x : bs.blocks[b]) {
      for (int y : bs.blocks[bs.image[b]]) r.set(x, y);
    }
  }
  return r;
}

namespace {

// Character scanner with 1-based position tracking.
class Scanner {
 public:
  explicit Scanner(std::string_view text) : text_(text) {}

  // Skips whitespace and '#' comments running to end of line.
  void skip_ws() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  bool done() {
    skip_ws();
    return pos_ >= text_.size();
  }

  // Whitespace within a row is tolerated; a digit is required next.
  char next_cell() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input, expected '0' or '1'");
    char c = text_[pos_];
    if (c != '0' && c != '1') fail("expected '0' or '1'");
    advance();
    return c;
  }

  uint64_t next_uint() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input, expected a dimension");
    if (!std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      fail("expected a dimension");
    }
    uint64_t v = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      v = v * 10 + static_cast<uint64_t>(text_[pos_] - '0');
      if (v > 100000) fail("dimension too large");
      advance();
    }
    return v;
  }

  // True when another token follows on the current line.
  bool more_on_line() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' ||
                                   text_[pos_] == '\r')) {
      advance();
    }
    return pos_ < text_.size() && text_[pos_] != '\n' && text_[pos_] != '#';
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(line_, col_, msg);
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  std::string_view text_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

Hom parse_matrix(std::string_view text, bool* declared_square) {
  Scanner sc(text);
  uint64_t n_src = sc.next_uint();
  uint64_t n_dst = n_src;
  *declared_square = !sc.more_on_line();
  if (!*declared_square) n_dst = sc.next_uint();
  Hom m(static_cast<int>(n_src), static_cast<int>(n_dst));
  for (uint64_t i = 0; i < n_src; ++i) {
    for (uint64_t j = 0; j < n_dst; ++j) {
      if (sc.next_cell() == '1') m.set(static_cast<int>(i), static_cast<int>(j));
    }
  }
  if (!sc.done()) sc.fail("unexpected trailing characters");
  return m;
}

}  // namespace

Rel parse_rel(std::string_view text) {
  bool square = false;
  Hom m = parse_matrix(text, &square);
  if (!square) {
    throw ParseError(1, 1, "expected a single dimension for a square relation");
  }
  return Rel(std::move(m));
}

Hom parse_hom(std::string_view text) {
  bool square = false;
  return parse_matrix(text, &square);
}

std::string to_text(const Hom& f) {
  std::ostringstream os;
  os << f.n_src() << ' ' << f.n_dst() << '\n';
  for (int i = 0; i < f.n_src(); ++i) {
    for (int j = 0; j < f.n_dst(); ++j) os << (f.at(i, j) ? '1' : '0');
    os << '\n';
  }
  return os.str();
}

std::string to_text(const Rel& r) {
  std::ostringstream os;
  os << r.size() << '\n';
  for (int i = 0; i < r.size(); ++i) {
    for (int j = 0; j < r.size(); ++j) os << (r.at(i, j) ? '1' : '0');
    os << '\n';
  }
  return os.str();
}

}  // namespace szymrel
