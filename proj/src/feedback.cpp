#include "qfb/feedback.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "qfb/decomp.hpp"

namespace qfb {

std::string feedback_kind_str(FeedbackKind k) {
    switch (k) {
        case FeedbackKind::identity: return "identity";
        case FeedbackKind::local_drive: return "local_drive";
        case FeedbackKind::epsilon_pair: return "epsilon_pair";
        case FeedbackKind::schematic_one_way: return "schematic_one_way";
        case FeedbackKind::schematic_two_way: return "schematic_two_way";
        case FeedbackKind::custom: return "custom";
    }
    return "custom";
}

FeedbackScheme identity_feedback(int n_qubits) {
    FeedbackScheme s;
    s.kind = FeedbackKind::identity;
    s.n_qubits = n_qubits;
    s.generator = CMat(dim(n_qubits), dim(n_qubits));
    s.unitary = CMat::identity(dim(n_qubits));
    return s;
}

CMat unitary_from_generator(const CMat& f) { return expi_hermitian(f); }

// Pulse areas a_i drive half-angle rotations: F = sum_i a_i sigma_x^(i) / 2.
// The 1/2 makes the feedback trivial exactly at a_i = k pi (identity for even
// k, the sector-preserving global bit flip for odd k), which is where the
// amplitude scans dip.
FeedbackScheme local_drive_feedback(const std::vector<double>& a) {
    const int n = static_cast<int>(a.size());
    if (n < 1) throw std::invalid_argument("local_drive_feedback: empty amplitude list");
    FeedbackScheme s;
    s.kind = FeedbackKind::local_drive;
    s.n_qubits = n;
    CMat f(dim(n), dim(n));
    for (int j = 1; j <= n; ++j) {
        f += (0.5 * a[j - 1]) * embed_single(sigma_x(), j, n).entries;
        s.params["a" + std::to_string(j)] = a[j - 1];
    }
    s.generator = std::move(f);
    s.unitary = unitary_from_generator(s.generator);
    return s;
}

FeedbackScheme epsilon_pair_feedback(double amplitude, double eps) {
    FeedbackScheme s = local_drive_feedback(
        {amplitude, amplitude * (1.0 - eps), -amplitude, -amplitude * (1.0 - eps)});
    s.kind = FeedbackKind::epsilon_pair;
    s.params.clear();
    s.params["A"] = amplitude;
    s.params["eps"] = eps;
    return s;
}

namespace {

// Coupled frame with the dark columns rotated so the target occupies the
// first dark column and an orthonormal complement the rest. Keeps the frame
// unitary, so sector blocks of any operator stay well defined.
struct DarkFrame {
    CMat w;
    std::size_t target_col = 0;
    std::vector<std::size_t> unwanted_cols;
};

DarkFrame dark_rotated_frame(const CoupledBasis& basis, const StateVector& target) {
    const std::vector<std::size_t> darks = basis.dark_ladders();
    if (darks.empty()) throw std::invalid_argument("dark frame: basis has no J=0 sector");
    if (target.amplitudes.size() != basis.transform.rows())
        throw std::invalid_argument("dark frame: dimension mismatch");

    std::vector<std::size_t> dark_cols;
    for (std::size_t li : darks) dark_cols.push_back(basis.ladders[li].first_col);

    CVec t = target.amplitudes;
    normalize(t);

    // target must lie in the dark span
    CVec proj(t.size());
    for (std::size_t c : dark_cols) {
        const CVec v = basis.column_vec(c);
        add_scaled(proj, inner(v, t), v);
    }
    CVec resid = t;
    add_scaled(resid, -1.0, proj);
    if (norm(resid) > 1e-8)
        throw std::invalid_argument("target is not in the dark subspace");

    // Gram-Schmidt complement of the target inside the dark span
    std::vector<CVec> frame{t};
    for (std::size_t c : dark_cols) {
        CVec v = basis.column_vec(c);
        for (const CVec& f : frame) add_scaled(v, -inner(f, v), f);
        const double r = norm(v);
        if (r > 1e-8) {
            for (cplx& x : v) x /= r;
            frame.push_back(std::move(v));
        }
    }
    if (frame.size() != dark_cols.size())
        throw std::runtime_error("dark frame: complement construction failed");

    DarkFrame out;
    out.w = basis.transform;
    out.target_col = dark_cols[0];
    for (std::size_t k = 0; k < dark_cols.size(); ++k) {
        for (std::size_t i = 0; i < out.w.rows(); ++i) out.w(i, dark_cols[k]) = frame[k][i];
        if (k > 0) out.unwanted_cols.push_back(dark_cols[k]);
    }
    return out;
}

}  // namespace

FeedbackScheme schematic_feedback(SchematicKind kind, const CoupledBasis& basis,
                                  const StateVector& target) {
    if (basis.n_qubits != 4)
        throw std::invalid_argument("schematic_feedback: defined for the 4-qubit system");
    const DarkFrame frame = dark_rotated_frame(basis, target);

    std::size_t j2 = basis.ladders.size();
    std::vector<std::size_t> j1;
    for (std::size_t i = 0; i < basis.ladders.size(); ++i) {
        if (basis.ladders[i].label.two_j == 4) j2 = i;
        if (basis.ladders[i].label.two_j == 2) j1.push_back(i);
    }
    if (j2 == basis.ladders.size() || j1.size() != 3)
        throw std::runtime_error("schematic_feedback: unexpected sector structure");

    // Chain J=2 -> J1a -> J1b -> J1c -> target. Each link is a pi/2 Givens
    // rotation |x> -> |y>, |y> -> -|x> on disjoint column pairs. One-way links
    // enter the next sector at J_z = +J (so jumps cannot run backwards) and
    // source at J_z = 0, one lowering step below the entry point; two-way
    // links sit entirely below +J and land on the jump-inactive J_z = -J
    // states, so each hop needs Hamiltonian remixing before the next one.
    std::vector<std::pair<std::size_t, std::size_t>> links;
    if (kind == SchematicKind::one_way) {
        links.push_back({basis.column(j2, -4), basis.column(j1[0], +2)});
        links.push_back({basis.column(j1[0], 0), basis.column(j1[1], +2)});
        links.push_back({basis.column(j1[1], 0), basis.column(j1[2], +2)});
        links.push_back({basis.column(j1[2], 0), frame.target_col});
    } else {
        links.push_back({basis.column(j2, -2), basis.column(j1[0], -2)});
        links.push_back({basis.column(j1[0], 0), basis.column(j1[1], -2)});
        links.push_back({basis.column(j1[1], 0), basis.column(j1[2], -2)});
        links.push_back({basis.column(j1[2], 0), frame.target_col});
    }

    const std::size_t d = dim(4);
    CMat g = CMat::identity(d);
    for (auto [x, y] : links) {
        g(x, x) = 0.0;
        g(y, y) = 0.0;
        g(y, x) = 1.0;
        g(x, y) = -1.0;
    }

    FeedbackScheme s;
    s.kind = kind == SchematicKind::one_way ? FeedbackKind::schematic_one_way
                                            : FeedbackKind::schematic_two_way;
    s.n_qubits = 4;
    s.unitary = frame.w * g * adjoint(frame.w);
    return s;
}

StrategyReport validate_strategy(const CMat& u, const StateVector& target,
                                 const CoupledBasis& basis) {
    if (u.rows() != basis.transform.rows() || u.rows() != u.cols())
        throw std::invalid_argument("validate_strategy: dimension mismatch");
    if (!is_unitary(u, 1e-8)) throw std::invalid_argument("validate_strategy: U is not unitary");
    const DarkFrame frame = dark_rotated_frame(basis, target);

    const CMat jm = collective(Collective::minus, basis.n_qubits).entries;
    const CMat m = adjoint(frame.w) * (u * jm) * frame.w;

    // Node partition: every J>0 ladder, plus target and unwanted dark columns.
    struct Node {
        std::string name;
        std::vector<std::size_t> cols;
        bool unwanted = false;
        bool dark = false;
    };
    std::vector<Node> nodes;
    std::size_t target_node = 0;
    for (std::size_t li = 0; li < basis.ladders.size(); ++li) {
        const Ladder& l = basis.ladders[li];
        if (l.label.two_j == 0) continue;
        Node n;
        n.name = l.label.str();
        for (std::size_t k = 0; k < l.dim(); ++k) n.cols.push_back(l.first_col + k);
        nodes.push_back(std::move(n));
    }
    {
        Node t;
        t.name = "target";
        t.cols = {frame.target_col};
        t.dark = true;
        target_node = nodes.size();
        nodes.push_back(std::move(t));
        for (std::size_t k = 0; k < frame.unwanted_cols.size(); ++k) {
            Node w;
            w.name = "unwanted[" + std::to_string(k) + "]";
            w.cols = {frame.unwanted_cols[k]};
            w.unwanted = true;
            w.dark = true;
            nodes.push_back(std::move(w));
        }
    }

    // Jump-edge blocks of U J_- with the relative zero threshold.
    const std::size_t nn = nodes.size();
    std::vector<double> blockmax(nn * nn, 0.0);
    double global_max = 0.0;
    for (std::size_t r = 0; r < nn; ++r)
        for (std::size_t c = 0; c < nn; ++c) {
            double mx = 0.0;
            for (std::size_t i : nodes[r].cols)
                for (std::size_t j : nodes[c].cols) mx = std::max(mx, std::abs(m(i, j)));
            blockmax[r * nn + c] = mx;
            global_max = std::max(global_max, mx);
        }
    const double thr = std::max(1e-300, 1e-10 * global_max);

    StrategyReport report;
    std::vector<std::vector<std::size_t>> rev_adj(nn);
    for (std::size_t c = 0; c < nn; ++c)
        for (std::size_t r = 0; r < nn; ++r)
            if (blockmax[r * nn + c] >= thr) {
                report.edges.push_back({nodes[c].name, nodes[r].name, "jump"});
                rev_adj[r].push_back(c);
            }
    for (const Node& n : nodes)
        if (n.cols.size() > 1) report.edges.push_back({n.name, n.name, "hamiltonian"});

    // Protection: ||P_u U v|| for every coupled column with J_z != +J must
    // vanish, since those are the only states J_- can expose to the feedback.
    double worst = 0.0;
    std::vector<CVec> unwanted_vecs;
    for (std::size_t c : frame.unwanted_cols) {
        CVec v(frame.w.rows());
        for (std::size_t i = 0; i < frame.w.rows(); ++i) v[i] = frame.w(i, c);
        unwanted_vecs.push_back(std::move(v));
    }
    for (std::size_t li = 0; li < basis.ladders.size(); ++li) {
        const Ladder& l = basis.ladders[li];
        for (std::size_t k = 0; k < l.dim(); ++k) {
            const std::size_t col = l.first_col + k;
            if (basis.two_jz_of_column(col) == l.label.two_j) continue;  // J_z = +J excluded
            const CVec uv = u * basis.column_vec(col);
            double p2 = 0.0;
            for (const CVec& w : unwanted_vecs) p2 += std::norm(inner(w, uv));
            worst = std::max(worst, std::sqrt(p2));
        }
    }
    report.max_unwanted_coupling = worst;
    report.protected_ = worst < 1e-10;

    // Reachability: reverse BFS from the target over jump edges.
    std::vector<char> reaches(nn, 0);
    std::deque<std::size_t> queue{target_node};
    reaches[target_node] = 1;
    while (!queue.empty()) {
        const std::size_t cur = queue.front();
        queue.pop_front();
        for (std::size_t src : rev_adj[cur])
            if (!reaches[src]) {
                reaches[src] = 1;
                queue.push_back(src);
            }
    }
    report.reachable = true;
    for (std::size_t i = 0; i < nn; ++i) {
        if (nodes[i].unwanted || reaches[i]) continue;
        report.reachable = false;
        if (!nodes[i].dark) report.blocking_sectors.push_back(nodes[i].name);
    }
    return report;
}

std::string strategy_report_json(const StrategyReport& report) {
    nlohmann::json j;
    j["protected"] = report.protected_;
    j["reachable"] = report.reachable;
    j["blocking_sectors"] = report.blocking_sectors;
    j["max_unwanted_coupling"] = report.max_unwanted_coupling;
    auto edges = nlohmann::json::array();
    for (const StrategyEdge& e : report.edges)
        edges.push_back({{"from", e.from}, {"to", e.to}, {"kind", e.kind}});
    j["edges"] = std::move(edges);
    return j.dump(2);
}

}  // namespace qfb
