// Copyright 2026 The knowbal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef KNOWBAL_QUANTUM_REF_H
#define KNOWBAL_QUANTUM_REF_H

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "knowbal/ontic_core.h"

namespace knowbal {

constexpr double kQuantumTol = 1e-12;

class QuantumState {
  public:
    explicit QuantumState(Eigen::VectorXcd amplitudes);

    int n_qubits() const { return n_; }
    const Eigen::VectorXcd &amplitudes() const { return amps_; }
    Eigen::MatrixXcd density() const { return amps_ * amps_.adjoint(); }

  private:
    int n_;
    Eigen::VectorXcd amps_;
};

// Single-qubit kets by name: "0", "1", "+", "-", "+i", "-i".
QuantumState ket(const std::string &name);
QuantumState tensor(const QuantumState &a, const QuantumState &b);
// "phi+", "phi-", "psi+", "psi-".
QuantumState bell_state(const std::string &name);

// Image of a one-system epistemic state: a ket, or I/2 for the mixed state.
struct AnalogState {
    bool mixed = false;
    Eigen::MatrixXcd density;
    Eigen::VectorXcd ket;  // empty when mixed
    std::string name;
};

AnalogState analog_state(const EpistemicState &s);
double phase_of(CoherentOp op);

double quantum_fidelity(const QuantumState &a, const QuantumState &b);
// Tr(sqrt(rho) sqrt(sigma)); reduces to |<a|b>|^2 on pure pairs.
double quantum_fidelity(const Eigen::MatrixXcd &rho, const Eigen::MatrixXcd &sigma);
double quantum_fidelity(const AnalogState &a, const AnalogState &b);

// (a + e^{i phase} b) / sqrt(2) for orthogonal single-qubit kets.
QuantumState superpose(const QuantumState &a, const QuantumState &b, double relative_phase);
// Returns c with a = c b when |c| = 1 within tolerance.
std::optional<std::complex<double>> global_phase_between(const QuantumState &a,
                                                         const QuantumState &b);

Eigen::Vector3d bloch_coordinates(const EpistemicState &s);

struct AuditEntry {
    std::string label;
    EpistemicState left;
    EpistemicState right;
    CoherentOp op;
    EpistemicState toy_result;
    QuantumState quantum_result;
    // Phase c with quantum_result = c * analog(toy_result), when they match.
    std::optional<std::complex<double>> phase;
    bool match() const { return phase.has_value(); }
};

// The twelve combinations of disjoint pure pairs with the four operations.
std::vector<AuditEntry> analogy_audit();

struct CorrelationTable {
    std::vector<std::string> rows;
    std::vector<std::string> columns;
    std::vector<std::string> cells;  // one string of C/A per row
    int anticorrelations(size_t row) const;
    std::string parity(size_t row) const;
};

CorrelationTable bell_table();
std::string table_csv(const CorrelationTable &t);

}  // namespace knowbal

#endif  // KNOWBAL_QUANTUM_REF_H
