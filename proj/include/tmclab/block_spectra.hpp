#pragma once

// Exact singular spectra of commutator blocks R_n, without materializing the
// exponentially many columns of large blocks.
//
// Coordinates strictly between the stable and unstable edges of block n form a
// gap G that no domain test reads and no holonomy writes, so R_n is block
// diagonal over the words the columns carry on G. Two gap words with the same
// first and last symbols give unitarily equivalent fibers (swap the words) as
// long as no uncancelled weight reads G. One representative fiber per class is
// assembled and its spectrum counted with the number of words in the class.
// When a representative does read G, every fiber of that class is assembled
// instead, up to a budget.

#include <string>
#include <vector>

#include "tmclab/schatten.hpp"

namespace tmc {

struct SpectraOptions {
  CommutatorKind kind = CommutatorKind::Plain;
  std::size_t cap = 20000;                 // columns per materialized fiber or block
  std::uint64_t enumeration_budget = 4096;  // fibers assembled one by one per class
  bool compress = true;                    // false forces full materialization
};

struct BlockSpectrum {
  Index n = 0;
  bool trusted = true;
  std::string method;  // "empty", "materialized", "fibers", "enumerated", or "truncated"
  std::uint64_t columns = 0;  // support columns, counted with multiplicity
  std::uint64_t rank = 0;
  double norm = 0.0;
  SingularSpectrum spectrum;
  std::string note;  // why a block is untrusted
};

BlockSpectrum block_spectrum(const TransitionMatrix& m, const Function& a, const Function& b, Index n,
                             const SpectraOptions& opt = {});
std::vector<BlockSpectrum> block_spectra(const TransitionMatrix& m, const Function& a, const Function& b, Index n_min,
                                         Index n_max, const SpectraOptions& opt = {});

// Spectrum of the direct sum of the trusted blocks; throws UntrustedBlocks if
// any block is untrusted.
SingularSpectrum merged_spectrum(const std::vector<BlockSpectrum>& blocks);

}  // namespace tmc
