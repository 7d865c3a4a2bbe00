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

#include "knowbal/quantum_ref.h"

#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace knowbal {

namespace {

using cd = std::complex<double>;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd &m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

Eigen::Matrix2cd pauli(char axis) {
    Eigen::Matrix2cd m;
    switch (axis) {
    case 'x': m << 0, 1, 1, 0; break;
    case 'y': m << 0, cd(0, -1), cd(0, 1), 0; break;
    default: m << 1, 0, 0, -1; break;
    }
    return m;
}

}  // namespace

QuantumState::QuantumState(Eigen::VectorXcd amplitudes) : amps_(std::move(amplitudes)) {
    Eigen::Index dim = amps_.size();
    if (dim < 2 || (dim & (dim - 1)) != 0 || dim > 8) {
        throw std::invalid_argument("state vector must have dimension 2, 4 or 8");
    }
    if (std::abs(amps_.norm() - 1.0) > kQuantumTol) {
        throw std::invalid_argument("state vector is not normalized");
    }
    n_ = 0;
    while ((Eigen::Index{1} << n_) < dim) ++n_;
}

QuantumState ket(const std::string &name) {
    Eigen::Vector2cd v;
    if (name == "0") v << 1, 0;
    else if (name == "1") v << 0, 1;
    else if (name == "+") v << kInvSqrt2, kInvSqrt2;
    else if (name == "-") v << kInvSqrt2, -kInvSqrt2;
    else if (name == "+i") v << kInvSqrt2, cd(0, kInvSqrt2);
    else if (name == "-i") v << kInvSqrt2, cd(0, -kInvSqrt2);
    else throw std::invalid_argument("unknown ket name: " + name);
    return QuantumState(v);
}

QuantumState tensor(const QuantumState &a, const QuantumState &b) {
    const auto &x = a.amplitudes();
    const auto &y = b.amplitudes();
    Eigen::VectorXcd out(x.size() * y.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) out.segment(i * y.size(), y.size()) = x(i) * y;
    return QuantumState(out);
}

QuantumState bell_state(const std::string &name) {
    Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
    if (name == "phi+") { v(0) = kInvSqrt2; v(3) = kInvSqrt2; }
    else if (name == "phi-") { v(0) = kInvSqrt2; v(3) = -kInvSqrt2; }
    else if (name == "psi+") { v(1) = kInvSqrt2; v(2) = kInvSqrt2; }
    else if (name == "psi-") { v(1) = kInvSqrt2; v(2) = -kInvSqrt2; }
    else throw std::invalid_argument("unknown Bell state: " + name);
    return QuantumState(v);
}

AnalogState analog_state(const EpistemicState &s) {
    if (s.shape().n_systems() != 1) {
        throw std::invalid_argument("the analogy map covers one system only");
    }
    AnalogState out;
    uint64_t m = s.members().word(0);
    const char *name = nullptr;
    switch (m) {
    case 0b0011: name = "0"; break;
    case 0b1100: name = "1"; break;
    case 0b0101: name = "+"; break;
    case 0b1010: name = "-"; break;
    case 0b0110: name = "+i"; break;
    case 0b1001: name = "-i"; break;
    case 0b1111:
        out.mixed = true;
        out.density = Eigen::Matrix2cd::Identity() / 2.0;
        out.name = "I/2";
        return out;
    default: throw std::invalid_argument("state " + to_literal(s) + " is not valid");
    }
    QuantumState q = ket(name);
    out.ket = q.amplitudes();
    out.density = q.density();
    out.name = std::string("|") + name + ">";
    return out;
}

double phase_of(CoherentOp op) {
    switch (op) {
    case CoherentOp::op1: return 0.0;
    case CoherentOp::op2: return M_PI;
    case CoherentOp::op3: return M_PI / 2;
    case CoherentOp::op4: return 3 * M_PI / 2;
    }
    return 0.0;
}

double quantum_fidelity(const QuantumState &a, const QuantumState &b) {
    if (a.n_qubits() != b.n_qubits()) throw std::invalid_argument("dimension mismatch");
    return std::norm(a.amplitudes().dot(b.amplitudes()));
}

double quantum_fidelity(const Eigen::MatrixXcd &rho, const Eigen::MatrixXcd &sigma) {
    if (rho.rows() != sigma.rows()) throw std::invalid_argument("dimension mismatch");
    return (psd_sqrt(rho) * psd_sqrt(sigma)).trace().real();
}

double quantum_fidelity(const AnalogState &a, const AnalogState &b) {
    if (!a.mixed && !b.mixed) return std::norm(a.ket.dot(b.ket));
    return quantum_fidelity(a.density, b.density);
}

QuantumState superpose(const QuantumState &a, const QuantumState &b, double relative_phase) {
    if (a.n_qubits() != 1 || b.n_qubits() != 1) {
        throw std::invalid_argument("superpose takes single-qubit states");
    }
    if (std::abs(a.amplitudes().dot(b.amplitudes())) > kQuantumTol) {
        throw std::invalid_argument("superpose needs orthogonal states");
    }
    Eigen::VectorXcd v = (a.amplitudes() + std::polar(1.0, relative_phase) * b.amplitudes()) * kInvSqrt2;
    return QuantumState(v);
}

std::optional<cd> global_phase_between(const QuantumState &a, const QuantumState &b) {
    if (a.n_qubits() != b.n_qubits()) return std::nullopt;
    cd overlap = b.amplitudes().dot(a.amplitudes());
    if (std::abs(std::abs(overlap) - 1.0) > 1e-9) return std::nullopt;
    if ((a.amplitudes() - overlap * b.amplitudes()).norm() > 1e-9) return std::nullopt;
    return overlap;
}

Eigen::Vector3d bloch_coordinates(const EpistemicState &s) {
    AnalogState a = analog_state(s);
    Eigen::Vector3d r;
    r(0) = (a.density * pauli('x')).trace().real();
    r(1) = (a.density * pauli('y')).trace().real();
    r(2) = (a.density * pauli('z')).trace().real();
    return r;
}

std::vector<AuditEntry> analogy_audit() {
    SystemShape one(1);
    const std::array<std::pair<uint64_t, uint64_t>, 3> pairs = {{
        {0b0011, 0b1100}, {0b0101, 0b1010}, {0b0110, 0b1001}}};
    std::vector<AuditEntry> out;
    int label = 1;
    for (const auto &[l, r] : pairs) {
        EpistemicState left(one, OnticSet::from_word(l));
        EpistemicState right(one, OnticSet::from_word(r));
        for (CoherentOp op : kCoherentOps) {
            EpistemicState toy = coherent_combine(left, right, op);
            QuantumState q = superpose(QuantumState(analog_state(left).ket),
                                       QuantumState(analog_state(right).ket), phase_of(op));
            QuantumState expected(analog_state(toy).ket);
            out.push_back(AuditEntry{"bo" + std::to_string(label++), left, right, op, toy, q,
                                     global_phase_between(q, expected)});
        }
    }
    return out;
}

int CorrelationTable::anticorrelations(size_t row) const {
    int n = 0;
    for (char c : cells[row]) n += c == 'A';
    return n;
}

std::string CorrelationTable::parity(size_t row) const {
    return anticorrelations(row) % 2 ? "odd" : "even";
}

CorrelationTable bell_table() {
    CorrelationTable t;
    t.rows = {"phi+", "phi-", "psi+", "psi-"};
    t.columns = {"{0,1}", "{+,-}", "{+i,-i}"};
    const std::array<std::array<const char *, 2>, 3> bases = {{{"0", "1"}, {"+", "-"}, {"+i", "-i"}}};
    for (const auto &row : t.rows) {
        QuantumState psi = bell_state(row);
        std::string cells;
        for (const auto &basis : bases) {
            double same = 0;
            for (const char *b : basis) same += quantum_fidelity(tensor(ket(b), ket(b)), psi);
            if (std::abs(same - 1.0) < 1e-9) cells += 'C';
            else if (std::abs(same) < 1e-9) cells += 'A';
            else cells += '?';
        }
        t.cells.push_back(cells);
    }
    return t;
}

std::string table_csv(const CorrelationTable &t) {
    std::ostringstream os;
    os << "state";
    for (const auto &c : t.columns) os << "," << c;
    os << ",parity\n";
    for (size_t r = 0; r < t.rows.size(); ++r) {
        os << t.rows[r];
        for (char c : t.cells[r]) os << "," << c;
        os << "," << t.parity(r) << "\n";
    }
    return os.str();
}

}  // namespace knowbal
