#include "qfb/spin_structure.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace qfb {

std::string half_int_str(int twice) {
    if (twice % 2 == 0) return std::to_string(twice / 2);
    return std::to_string(twice) + "/2";
}

std::string SectorLabel::str() const {
    std::string s = "J=" + half_int_str(two_j) + ",lam=(";
    for (std::size_t i = 0; i < two_history.size(); ++i) {
        if (i) s += ',';
        s += half_int_str(two_history[i]);
    }
    s += ')';
    return s;
}

std::size_t CoupledBasis::column(std::size_t ladder_idx, int two_jz) const {
    const Ladder& l = ladders.at(ladder_idx);
    if (two_jz < -l.label.two_j || two_jz > l.label.two_j || (two_jz + l.label.two_j) % 2 != 0)
        throw std::out_of_range("CoupledBasis::column: J_z outside ladder");
    return l.first_col + static_cast<std::size_t>((two_jz + l.label.two_j) / 2);
}

std::size_t CoupledBasis::ladder_of_column(std::size_t col) const {
    for (std::size_t i = 0; i < ladders.size(); ++i)
        if (col >= ladders[i].first_col && col < ladders[i].first_col + ladders[i].dim()) return i;
    throw std::out_of_range("CoupledBasis::ladder_of_column");
}

int CoupledBasis::two_jz_of_column(std::size_t col) const {
    const Ladder& l = ladders[ladder_of_column(col)];
    return -l.label.two_j + 2 * static_cast<int>(col - l.first_col);
}

std::string CoupledBasis::column_label(std::size_t col) const {
    const Ladder& l = ladders[ladder_of_column(col)];
    std::string s = "J=" + half_int_str(l.label.two_j) +
                    ",Jz=" + half_int_str(two_jz_of_column(col)) + ",lam=(";
    for (std::size_t i = 0; i < l.label.two_history.size(); ++i) {
        if (i) s += ',';
        s += half_int_str(l.label.two_history[i]);
    }
    s += ')';
    return s;
}

CVec CoupledBasis::column_vec(std::size_t col) const {
    CVec v(transform.rows());
    for (std::size_t i = 0; i < transform.rows(); ++i) v[i] = transform(i, col);
    return v;
}

std::vector<std::size_t> CoupledBasis::dark_ladders() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < ladders.size(); ++i)
        if (ladders[i].label.two_j == 0) out.push_back(i);
    return out;
}

namespace {

// One partially-coupled ladder: columns indexed by (two_jz + two_j)/2, each a
// vector over the first k qubits.
struct PartialLadder {
    int two_j;
    std::vector<int> two_history;
    std::vector<CVec> cols;
};

// Couple a ladder of spin a/2 with one more qubit (appended as the least
// significant bit). Condon-Shortley throughout, so J_+- matrix elements stay
// positive real. Child two_j = a + 1 (up) or a - 1 (down, only for a >= 1).
PartialLadder couple_child(const PartialLadder& p, bool up) {
    const int a = p.two_j;
    const int c = up ? a + 1 : a - 1;
    PartialLadder child;
    child.two_j = c;
    child.two_history = p.two_history;
    child.two_history.push_back(c);
    const std::size_t pd = p.cols.front().size();
    child.cols.assign(static_cast<std::size_t>(c) + 1, CVec(2 * pd));

    for (int tm = -c; tm <= c; tm += 2) {
        CVec& dst = child.cols[static_cast<std::size_t>((tm + c) / 2)];
        const double denom = 2.0 * (a + 1);
        // |e> part couples the parent at two_jz = tm - 1, |g> part at tm + 1
        if (std::abs(tm - 1) <= a) {
            const double ce = up ? std::sqrt((a + tm + 1) / denom) : -std::sqrt((a - tm + 1) / denom);
            const CVec& src = p.cols[static_cast<std::size_t>((tm - 1 + a) / 2)];
            for (std::size_t i = 0; i < pd; ++i) dst[2 * i + 1] += ce * src[i];
        }
        if (std::abs(tm + 1) <= a) {
            const double cg = up ? std::sqrt((a - tm + 1) / denom) : std::sqrt((a + tm + 1) / denom);
            const CVec& src = p.cols[static_cast<std::size_t>((tm + 1 + a) / 2)];
            for (std::size_t i = 0; i < pd; ++i) dst[2 * i] += cg * src[i];
        }
    }
    return child;
}

}  // namespace

CoupledBasis build_coupled_basis(int n_qubits) {
    if (n_qubits < 1 || n_qubits > 12)
        throw std::invalid_argument("build_coupled_basis: supported range is 1 <= N <= 12");

    std::vector<PartialLadder> cur;
    cur.push_back({1, {}, {CVec{1.0, 0.0}, CVec{0.0, 1.0}}});  // |g> at J_z=-1/2, |e> at +1/2

    for (int k = 2; k <= n_qubits; ++k) {
        std::vector<PartialLadder> next;
        next.reserve(2 * cur.size());
        for (const PartialLadder& p : cur) {
            next.push_back(couple_child(p, true));
            if (p.two_j >= 1) next.push_back(couple_child(p, false));
        }
        cur = std::move(next);
    }

    CoupledBasis basis;
    basis.n_qubits = n_qubits;
    const std::size_t d = dim(n_qubits);
    basis.transform = CMat(d, d);
    std::size_t col = 0;
    for (const PartialLadder& p : cur) {
        Ladder l;
        l.label.two_j = p.two_j;
        l.label.two_history = p.two_history;
        l.first_col = col;
        for (const CVec& v : p.cols) {
            for (std::size_t i = 0; i < d; ++i) basis.transform(i, col) = v[i];
            ++col;
        }
        basis.ladders.push_back(std::move(l));
    }
    return basis;
}

std::vector<StateVector> dark_basis(int n_qubits) {
    if (n_qubits % 2 != 0)
        throw std::invalid_argument(
            "dark_basis: no singlet sector exists for an odd number of qubits");
    const CoupledBasis basis = build_coupled_basis(n_qubits);
    std::vector<StateVector> out;
    for (std::size_t li : basis.dark_ladders())
        out.emplace_back(basis.column_vec(basis.ladders[li].first_col), n_qubits);
    return out;
}

StateVector singlet_state(double alpha, double beta, double theta, double phi) {
    if (alpha == 0.0 && beta == 0.0)
        throw std::invalid_argument("singlet_state: (alpha, beta) must not both be zero");
    const cplx a = std::polar(alpha, theta);
    const cplx b = std::polar(beta, phi);
    CVec amps(16);
    amps[0b0011] = a;        // ggee
    amps[0b1100] = a;        // eegg
    amps[0b0101] = b;        // gege
    amps[0b1010] = b;        // egeg
    amps[0b0110] = -(a + b); // geeg
    amps[0b1001] = -(a + b); // egge
    normalize(amps);
    return {std::move(amps), 4};
}

BlockDecomposition::BlockDecomposition(const OperatorMatrix& a, const CoupledBasis& basis,
                                       double threshold)
    : threshold_(threshold) {
    if (a.entries.rows() != basis.transform.rows())
        throw std::invalid_argument("block_decompose: dimension mismatch");
    for (const Ladder& l : basis.ladders) sectors_.push_back(l.label);

    const CMat m = adjoint(basis.transform) * a.entries * basis.transform;
    const std::size_t ns = sectors_.size();
    blocks_.reserve(ns * ns);
    maxabs_.reserve(ns * ns);
    for (std::size_t r = 0; r < ns; ++r) {
        const Ladder& lr = basis.ladders[r];
        for (std::size_t c = 0; c < ns; ++c) {
            const Ladder& lc = basis.ladders[c];
            CMat blk(lr.dim(), lc.dim());
            double mx = 0.0;
            for (std::size_t i = 0; i < lr.dim(); ++i)
                for (std::size_t j = 0; j < lc.dim(); ++j) {
                    blk(i, j) = m(lr.first_col + i, lc.first_col + j);
                    mx = std::max(mx, std::abs(blk(i, j)));
                }
            blocks_.push_back(std::move(blk));
            maxabs_.push_back(mx);
        }
    }
}

const CMat& BlockDecomposition::block(std::size_t r, std::size_t c) const {
    return blocks_.at(r * sectors_.size() + c);
}

double BlockDecomposition::block_max_abs(std::size_t r, std::size_t c) const {
    return maxabs_.at(r * sectors_.size() + c);
}

bool BlockDecomposition::zero(std::size_t r, std::size_t c) const {
    return block_max_abs(r, c) < threshold_;
}

BlockDecomposition block_decompose(const OperatorMatrix& a, const CoupledBasis& basis) {
    return BlockDecomposition(a, basis);
}

std::string coupled_basis_json(const CoupledBasis& basis) {
    nlohmann::json j;
    j["n_qubits"] = basis.n_qubits;
    j["dimension"] = basis.transform.rows();
    auto labels = nlohmann::json::array();
    for (std::size_t c = 0; c < basis.transform.cols(); ++c) labels.push_back(basis.column_label(c));
    j["labels"] = std::move(labels);
    auto sectors = nlohmann::json::array();
    for (const Ladder& l : basis.ladders)
        sectors.push_back({{"label", l.label.str()},
                           {"first_column", l.first_col},
                           {"dimension", l.dim()}});
    j["sectors"] = std::move(sectors);
    auto t = nlohmann::json::array();
    for (std::size_t i = 0; i < basis.transform.rows(); ++i)
        for (std::size_t c = 0; c < basis.transform.cols(); ++c)
            t.push_back({basis.transform(i, c).real(), basis.transform(i, c).imag()});
    j["transform"] = std::move(t);
    auto darks = nlohmann::json::array();
    for (std::size_t li : basis.dark_ladders()) darks.push_back(basis.ladders[li].first_col);
    j["dark_columns"] = std::move(darks);
    return j.dump(2);
}

}  // namespace qfb
