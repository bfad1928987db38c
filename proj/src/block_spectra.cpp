#include "tmclab/block_spectra.hpp"

#include <map>

namespace tmc {

namespace {

struct Fiber {
  SingularSpectrum spectrum;
  std::uint64_t columns = 0;
  bool reads_pinned = false;
};

// Assembles R on the given columns and returns its spectrum.
Fiber assemble(const CommutatorAssembler& ca, const std::vector<Point>& cols, Index pin_lo, Index pin_hi) {
  Fiber f;
  std::map<Point, Eigen::Index> rows;
  std::vector<CommutatorAssembler::Column> acted;
  acted.reserve(cols.size());
  for (const Point& x : cols) {
    acted.push_back(ca.act(x, pin_lo, pin_hi));
    f.reads_pinned = f.reads_pinned || acted.back().reads_pinned;
    for (const auto& e : acted.back().entries) rows.emplace(e.first, 0);
  }
  f.columns = cols.size();
  if (rows.empty()) return f;
  Eigen::Index k = 0;
  for (auto& [p, i] : rows) i = k++;
  // zero columns add nothing to the spectrum
  Eigen::Index nonzero = 0;
  for (const auto& c : acted) nonzero += !c.entries.empty();
  Eigen::MatrixXcd dense = Eigen::MatrixXcd::Zero(k, nonzero);
  Eigen::Index j = 0;
  for (const auto& c : acted) {
    if (c.entries.empty()) continue;
    for (const auto& [y, v] : c.entries) dense(rows.at(y), j) = v;
    ++j;
  }
  f.spectrum = singular_values(dense);
  return f;
}

void finish(BlockSpectrum& b, std::vector<SpectrumLevel> levels) {
  b.spectrum = SingularSpectrum::from_levels(std::move(levels), "block " + std::to_string(b.n));
  b.rank = b.spectrum.size();
  b.norm = b.spectrum.largest();
}

void truncate(BlockSpectrum& b, const std::string& why) {
  b.trusted = false;
  b.method = "truncated";
  b.note = why;
  b.spectrum = {};
  b.rank = 0;
  b.norm = 0.0;
}

}  // namespace

BlockSpectrum block_spectrum(const TransitionMatrix& m, const Function& a, const Function& b, Index n,
                             const SpectraOptions& opt) {
  BlockSpectrum out;
  out.n = n;
  const auto [an, bn] = block_functions(a, b, n, opt.kind);
  if (an.terms.empty() || bn.terms.empty()) {
    out.method = "empty";
    return out;
  }
  const CommutatorAssembler ca(m, an, bn);
  const Index lo = ca.stable_edge() + 1, hi = ca.unstable_edge() - 1;
  try {
    if (!opt.compress || hi < lo) {
      const std::vector<Point> cols = ca.columns(opt.cap);
      Fiber f = assemble(ca, cols, 1, 0);
      out.method = cols.empty() ? "empty" : "materialized";
      out.columns = f.columns;
      finish(out, f.spectrum.levels());
      return out;
    }
    const Index len = hi - lo + 1;
    std::vector<SpectrumLevel> levels;
    out.method = "fibers";
    for (Symbol s = 0; s < m.size(); ++s)
      for (Symbol t = 0; t < m.size(); ++t) {
        if (len == 1 && s != t) continue;
        const std::uint64_t mult = count_words(m, s, len, t);
        if (mult == 0) continue;
        Word rep{s};
        if (len >= 2) {
          const auto mid = first_bridge_word(m, s, len - 2, t);
          rep.insert(rep.end(), mid->begin(), mid->end());
          rep.push_back(t);
        }
        Fiber f = assemble(ca, ca.columns(opt.cap, rep, lo), lo, hi);
        if (!f.reads_pinned) {
          for (SpectrumLevel l : f.spectrum.levels()) {
            if (__builtin_mul_overflow(l.multiplicity, mult, &l.multiplicity))
              throw Error(Errc::InvalidInput, "spectrum multiplicity overflows 64 bits");
            levels.push_back(l);
          }
          std::uint64_t cols = 0;
          out.columns = __builtin_mul_overflow(f.columns, mult, &cols) || __builtin_add_overflow(out.columns, cols, &cols)
                            ? UINT64_MAX
                            : cols;
          continue;
        }
        // weights read the gap: assemble every fiber of this class
        if (mult > opt.enumeration_budget) {
          truncate(out, "gap-reading fibers exceed the enumeration budget");
          return out;
        }
        out.method = "enumerated";
        std::vector<Word> words;
        if (len == 1) {
          words.push_back({s});
        } else {
          for (Word mid : bridge_words(m, s, len - 2, t, opt.enumeration_budget)) {
            mid.insert(mid.begin(), s);
            mid.push_back(t);
            words.push_back(std::move(mid));
          }
        }
        for (const Word& w : words) {
          Fiber g = assemble(ca, ca.columns(opt.cap, w, lo), lo, hi);
          levels.insert(levels.end(), g.spectrum.levels().begin(), g.spectrum.levels().end());
          out.columns += g.columns;
        }
      }
    finish(out, std::move(levels));
  } catch (const Error& e) {
    if (e.code() != Errc::BasisCapExceeded) throw;
    truncate(out, e.what());
  }
  return out;
}

std::vector<BlockSpectrum> block_spectra(const TransitionMatrix& m, const Function& a, const Function& b, Index n_min,
                                         Index n_max, const SpectraOptions& opt) {
  std::vector<BlockSpectrum> out;
  for (Index n = n_min; n <= n_max; ++n) out.push_back(block_spectrum(m, a, b, n, opt));
  return out;
}

SingularSpectrum merged_spectrum(const std::vector<BlockSpectrum>& blocks) {
  std::vector<SingularSpectrum> parts;
  std::string bad;
  for (const BlockSpectrum& b : blocks) {
    if (!b.trusted) bad += (bad.empty() ? "" : ", ") + std::to_string(b.n);
    parts.push_back(b.spectrum);
  }
  if (!bad.empty()) throw Error(Errc::UntrustedBlocks, "untrusted blocks: " + bad);
  if (blocks.empty()) return {};
  return merge(parts, "blocks [" + std::to_string(blocks.front().n) + ", " + std::to_string(blocks.back().n) + "]");
}

}  // namespace tmc
