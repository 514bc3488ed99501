#pragma once

#include <map>
#include <string>
#include <vector>

#include "qfb/spin_structure.hpp"

namespace qfb {

enum class FeedbackKind {
    identity,
    local_drive,
    epsilon_pair,
    schematic_one_way,
    schematic_two_way,
    custom,
};

std::string feedback_kind_str(FeedbackKind k);

/// Feedback applied after every collective detection event: the jump operator
/// becomes U J_-. The generator F is a dimensionless pulse area, U = exp(iF).
struct FeedbackScheme {
    FeedbackKind kind = FeedbackKind::identity;
    int n_qubits = 0;
    CMat generator;  // may be empty (schematic/custom schemes carry only U)
    CMat unitary;
    std::map<std::string, double> params;

    bool has_generator() const { return !generator.empty(); }
};

FeedbackScheme identity_feedback(int n_qubits);

/// exp(iF) for Hermitian F. Throws std::invalid_argument on non-Hermitian input.
CMat unitary_from_generator(const CMat& f);

/// F = sum_i a_i sigma_x^(i)  (driving each atom with its own pulse area).
FeedbackScheme local_drive_feedback(const std::vector<double>& a);

/// F = A sx1 + A(1-eps) sx2 - A sx3 - A(1-eps) sx4  (4 qubits).
FeedbackScheme epsilon_pair_feedback(double amplitude, double eps);

enum class SchematicKind { one_way, two_way };

/// Concrete unitary realising the sector-chain arrow pattern for N=4:
/// pi/2 Givens rotations in the coupled basis linking J=2 -> each J=1 ladder
/// -> the target dark state; one_way enters each sector at J_z=+J (acyclic
/// jump digraph), two_way enters at J_z != +J (bidirectional transitions).
/// The unwanted dark state is left strictly fixed. Throws if the target is
/// not in the dark subspace.
FeedbackScheme schematic_feedback(SchematicKind kind, const CoupledBasis& basis,
                                  const StateVector& target);

struct StrategyEdge {
    std::string from;
    std::string to;
    std::string kind;  // "jump" | "hamiltonian"
};

struct StrategyReport {
    bool protected_ = false;  // no coupled state with J_z != +J maps onto an unwanted dark state
    bool reachable = false;   // every sector has a jump path to the target
    std::vector<std::string> blocking_sectors;
    std::vector<StrategyEdge> edges;
    double max_unwanted_coupling = 0.0;  // max ||P_u U v|| over tested columns
};

/// Graph analysis of the combined jump operator U J_- over the coupled
/// sectors, with the dark sector split into target and unwanted directions.
StrategyReport validate_strategy(const CMat& u, const StateVector& target,
                                 const CoupledBasis& basis);

std::string strategy_report_json(const StrategyReport& report);

}  // namespace qfb
