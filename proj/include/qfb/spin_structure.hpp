#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qfb/hilbert.hpp"
#include "qfb/linalg.hpp"

namespace qfb {

/// Half-integers are stored doubled (two_j = 2J) so all labels stay integral.
std::string half_int_str(int twice);

/// One invariant ladder {(J, J_z, lambda) : J_z = -J..+J}. lambda is the
/// coupling history: 2J after adding qubits 2..N (the last entry equals two_j).
struct SectorLabel {
    int two_j = 0;
    std::vector<int> two_history;

    std::string str() const;  // e.g. "J=1,lam=(1,1/2,1)"
    bool operator==(const SectorLabel&) const = default;
};

struct Ladder {
    SectorLabel label;
    std::size_t first_col = 0;  // columns [first_col, first_col + dim), J_z ascending
    std::size_t dim() const { return static_cast<std::size_t>(label.two_j) + 1; }
};

/// Simultaneous eigenbasis of J^2 and J_z built by coupling one qubit at a
/// time with Condon-Shortley phases. Columns of `transform` are the coupled
/// vectors in the computational basis; ladder order and phases are
/// deterministic for fixed N.
struct CoupledBasis {
    int n_qubits = 0;
    CMat transform;
    std::vector<Ladder> ladders;

    std::size_t column(std::size_t ladder_idx, int two_jz) const;
    std::size_t ladder_of_column(std::size_t col) const;
    int two_jz_of_column(std::size_t col) const;
    std::string column_label(std::size_t col) const;  // "J=1,Jz=0,lam=(1,1/2,1)"
    CVec column_vec(std::size_t col) const;
    std::vector<std::size_t> dark_ladders() const;  // two_j == 0, ladder order
};

CoupledBasis build_coupled_basis(int n_qubits);  // 1 <= N <= 12

/// Orthonormal basis of { v : J_- v = 0 and J_+ v = 0 } = the J=0 sector.
/// Throws for odd N (no singlet sector).
std::vector<StateVector> dark_basis(int n_qubits);

/// The 4-qubit dark family: normalised
///   alpha e^{i theta} (|ggee> + |eegg>) + beta e^{i phi} (|gege> + |egeg>)
///   - (alpha e^{i theta} + beta e^{i phi}) (|geeg> + |egge>).
/// Throws if (alpha, beta) == (0, 0).
StateVector singlet_state(double alpha, double beta, double theta, double phi);

/// Blocks of basis^dag * A * basis indexed by (row sector, col sector).
/// A block counts as zero when its max entry magnitude < threshold.
class BlockDecomposition {
public:
    BlockDecomposition(const OperatorMatrix& a, const CoupledBasis& basis,
                       double threshold = 1e-10);

    std::size_t n_sectors() const { return sectors_.size(); }
    const SectorLabel& sector(std::size_t i) const { return sectors_[i]; }
    const CMat& block(std::size_t row_sector, std::size_t col_sector) const;
    double block_max_abs(std::size_t row_sector, std::size_t col_sector) const;
    bool zero(std::size_t row_sector, std::size_t col_sector) const;
    double threshold() const { return threshold_; }

private:
    std::vector<SectorLabel> sectors_;
    std::vector<CMat> blocks_;
    std::vector<double> maxabs_;
    double threshold_;
};

BlockDecomposition block_decompose(const OperatorMatrix& a, const CoupledBasis& basis);

/// JSON export: labels as strings, transform as row-major [re, im] pairs.
std::string coupled_basis_json(const CoupledBasis& basis);

}  // namespace qfb
