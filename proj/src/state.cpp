// Copyright 2026 the pvbell authors
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

#include "state.hpp"

#include <Eigen/Eigenvalues>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "errors.hpp"
#include "rng.hpp"
#include "text_io.hpp"

namespace pvbell {

namespace {

constexpr std::uint64_t kStateSamplingStream = 0x73746174656e63ull;

Eigen::Index pow_dim(int local_dim, int num_parties) {
  Eigen::Index dim = 1;
  for (int i = 0; i < num_parties; ++i) {
    if (dim > (1 << 26) / local_dim)
      fail(Errc::cap_exceeded, "state dimension too large");
    dim *= local_dim;
  }
  return dim;
}

std::string fmt_param(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Keep eigenpairs with weight above this when building the ensemble of a
// mixed state; smaller components cannot move any probability by more than
// the behavior tolerances.
constexpr double kEnsembleWeightFloor = 1e-14;

}  // namespace

std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t seed) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

void validate_pure(const PureState& psi) {
  const Eigen::Index dim = pow_dim(psi.local_dim, psi.num_parties);
  if (psi.amplitudes.size() != dim)
    fail(Errc::validation_error, "amplitude vector has wrong length");
  const double norm = psi.amplitudes.norm();
  if (std::abs(norm - 1.0) > kPureNormTol)
    fail(Errc::validation_error,
         "pure state is not normalized: |norm-1| = " + fmt_param(norm - 1.0));
}

void validate_density(const DensityMatrix& rho) {
  const Eigen::Index dim = pow_dim(rho.local_dim, rho.num_parties);
  if (rho.entries.rows() != dim || rho.entries.cols() != dim)
    fail(Errc::validation_error, "density matrix has wrong shape");
  const double herm_dev =
      (rho.entries - rho.entries.adjoint()).cwiseAbs().maxCoeff();
  if (herm_dev > kHermitianTol)
    fail(Errc::validation_error,
         "density matrix is not Hermitian: max deviation " + fmt_param(herm_dev));
  const std::complex<double> tr = rho.entries.trace();
  if (std::abs(tr - 1.0) > kTraceTol)
    fail(Errc::validation_error,
         "density matrix trace is not 1: trace = " + fmt_param(tr.real()));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho.entries,
                                                         Eigen::EigenvaluesOnly);
  const double min_eig = solver.eigenvalues().minCoeff();
  if (min_eig < -kPsdTol)
    fail(Errc::validation_error,
         "density matrix is not positive semidefinite: min eigenvalue " +
             fmt_param(min_eig));
}

State State::pure(PureState psi, std::string descriptor) {
  validate_pure(psi);
  State s;
  s.num_parties_ = psi.num_parties;
  s.local_dim_ = psi.local_dim;
  s.dim_ = psi.amplitudes.size();
  s.descriptor_ = std::move(descriptor);
  s.ensemble_.weights = {1.0};
  s.ensemble_.vectors = psi.amplitudes;
  std::uint64_t h = fnv1a64(s.descriptor_.data(), s.descriptor_.size());
  h = fnv1a64(psi.amplitudes.data(),
              sizeof(std::complex<double>) * psi.amplitudes.size(), h);
  s.fingerprint_ = h;
  s.pure_ = std::make_shared<const PureState>(std::move(psi));
  return s;
}

State State::mixed(DensityMatrix rho, std::string descriptor) {
  validate_density(rho);
  State s;
  s.num_parties_ = rho.num_parties;
  s.local_dim_ = rho.local_dim;
  s.dim_ = rho.entries.rows();
  s.descriptor_ = std::move(descriptor);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho.entries);
  const auto& vals = solver.eigenvalues();
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    const double w = std::max(0.0, vals[i]);
    if (w < kEnsembleWeightFloor) continue;
    s.ensemble_.weights.push_back(w);
  }
  s.ensemble_.vectors.resize(s.dim_,
                             static_cast<Eigen::Index>(s.ensemble_.weights.size()));
  Eigen::Index col = 0;
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    if (std::max(0.0, vals[i]) < kEnsembleWeightFloor) continue;
    s.ensemble_.vectors.col(col++) = solver.eigenvectors().col(i);
  }

  std::uint64_t h = fnv1a64(s.descriptor_.data(), s.descriptor_.size());
  h = fnv1a64(rho.entries.data(),
              sizeof(std::complex<double>) * rho.entries.size(), h);
  s.fingerprint_ = h;
  s.density_ = std::make_shared<const DensityMatrix>(std::move(rho));
  return s;
}

const PureState& State::pure_state() const {
  if (!pure_) fail(Errc::invalid_argument, "state is not pure");
  return *pure_;
}

const DensityMatrix& State::density_matrix() const {
  if (!density_) {
    DensityMatrix rho;
    rho.num_parties = num_parties_;
    rho.local_dim = local_dim_;
    rho.entries = pure_->amplitudes * pure_->amplitudes.adjoint();
    density_ = std::make_shared<const DensityMatrix>(std::move(rho));
  }
  return *density_;
}

State make_ghz(int num_parties, int local_dim, double alpha) {
  if (num_parties < 1) fail(Errc::invalid_argument, "GHZ needs N >= 1");
  if (local_dim != 2 && local_dim != 3)
    fail(Errc::invalid_argument, "GHZ is defined here for d = 2 or 3");
  if (!(alpha >= 0.0 && alpha <= std::numbers::pi / 2 + 1e-12))
    fail(Errc::invalid_argument, "GHZ alpha must lie in [0, pi/2]");

  PureState psi;
  psi.num_parties = num_parties;
  psi.local_dim = local_dim;
  psi.amplitudes = Eigen::VectorXcd::Zero(pow_dim(local_dim, num_parties));
  const Eigen::Index dim = psi.amplitudes.size();
  auto repeated = [&](int digit) {
    // index of |digit digit ... digit>
    Eigen::Index idx = 0;
    for (int i = 0; i < num_parties; ++i) idx = idx * local_dim + digit;
    return idx;
  };
  if (local_dim == 2) {
    psi.amplitudes[repeated(0)] = std::sin(alpha);
    psi.amplitudes[dim - 1] = std::cos(alpha);
  } else {
    psi.amplitudes[repeated(0)] = std::sin(alpha);
    const double c = std::cos(alpha) / std::numbers::sqrt2;
    psi.amplitudes[repeated(1)] = c;
    psi.amplitudes[repeated(2)] = c;
  }
  psi.amplitudes.normalize();
  return State::pure(std::move(psi),
                     "ghz(n=" + std::to_string(num_parties) +
                         ",d=" + std::to_string(local_dim) +
                         ",alpha=" + fmt_param(alpha) + ")");
}

State make_dicke(int num_parties, int excitations) {
  if (num_parties < 2 || excitations < 1 || excitations > num_parties - 1)
    fail(Errc::invalid_argument, "Dicke state needs 1 <= e <= N-1");
  PureState psi;
  psi.num_parties = num_parties;
  psi.local_dim = 2;
  psi.amplitudes = Eigen::VectorXcd::Zero(pow_dim(2, num_parties));
  long count = 0;
  for (Eigen::Index idx = 0; idx < psi.amplitudes.size(); ++idx) {
    if (std::popcount(static_cast<std::uint64_t>(idx)) == excitations) {
      psi.amplitudes[idx] = 1.0;
      ++count;
    }
  }
  psi.amplitudes /= std::sqrt(static_cast<double>(count));
  return State::pure(std::move(psi), "dicke(n=" + std::to_string(num_parties) +
                                         ",e=" + std::to_string(excitations) + ")");
}

State make_psi3(double theta) {
  if (!(theta >= 0.0 && theta <= std::numbers::pi / 2 + 1e-12))
    fail(Errc::invalid_argument, "psi3 theta must lie in [0, pi/2]");
  PureState psi;
  psi.num_parties = 3;
  psi.local_dim = 2;
  psi.amplitudes = Eigen::VectorXcd::Zero(8);
  psi.amplitudes[0b111] = std::cos(theta);
  const double w = std::sin(theta) / std::sqrt(3.0);
  psi.amplitudes[0b001] = w;
  psi.amplitudes[0b010] = w;
  psi.amplitudes[0b100] = w;
  return State::pure(std::move(psi), "psi3(theta=" + fmt_param(theta) + ")");
}

NamedState named_state_from_string(const std::string& name) {
  if (name == "singlet4") return NamedState::singlet4;
  if (name == "cluster4") return NamedState::cluster4;
  if (name == "aharonov3") return NamedState::aharonov3;
  if (name == "qutrit_dicke_q1" || name == "q1") return NamedState::qutrit_dicke_q1;
  if (name == "qutrit_dicke_q2" || name == "q2") return NamedState::qutrit_dicke_q2;
  if (name == "qutrit_dicke_q3" || name == "q3") return NamedState::qutrit_dicke_q3;
  if (name == "smolin4") return NamedState::smolin4;
  if (name == "werner2") return NamedState::werner2;
  fail(Errc::invalid_argument, "unknown named state '" + name + "'");
}

namespace {

State pure_from_terms(int num_parties, int local_dim,
                      const std::vector<std::pair<const char*, double>>& terms,
                      const char* descriptor) {
  PureState psi;
  psi.num_parties = num_parties;
  psi.local_dim = local_dim;
  psi.amplitudes = Eigen::VectorXcd::Zero(pow_dim(local_dim, num_parties));
  for (const auto& [digits, coeff] : terms) {
    Eigen::Index idx = 0;
    for (const char* c = digits; *c; ++c) idx = idx * local_dim + (*c - '0');
    psi.amplitudes[idx] += coeff;
  }
  return State::pure(std::move(psi), descriptor);
}

State make_smolin4() {
  // Uniform mixture of the four two-qubit Bell states paired with
  // themselves: (1/4) sum_i |Phi_i><Phi_i| (x) |Phi_i><Phi_i|.
  const double s = 1.0 / std::numbers::sqrt2;
  Eigen::MatrixXcd bell(4, 4);
  bell.setZero();
  bell.col(0) << s, 0, 0, s;    // Phi+
  bell.col(1) << s, 0, 0, -s;   // Phi-
  bell.col(2) << 0, s, s, 0;    // Psi+
  bell.col(3) << 0, s, -s, 0;   // Psi-
  DensityMatrix rho;
  rho.num_parties = 4;
  rho.local_dim = 2;
  rho.entries = Eigen::MatrixXcd::Zero(16, 16);
  for (int i = 0; i < 4; ++i) {
    Eigen::VectorXcd pair(16);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) pair[4 * a + b] = bell(a, i) * bell(b, i);
    rho.entries += 0.25 * pair * pair.adjoint();
  }
  return State::mixed(std::move(rho), "smolin4");
}

State make_werner2() {
  const double p = 1.0 / std::numbers::sqrt2;
  const State ghz = make_ghz(2, 2, std::numbers::pi / 4);
  DensityMatrix rho;
  rho.num_parties = 2;
  rho.local_dim = 2;
  rho.entries = p * ghz.pure_state().amplitudes *
                    ghz.pure_state().amplitudes.adjoint() +
                (1.0 - p) * 0.25 * Eigen::MatrixXcd::Identity(4, 4);
  return State::mixed(std::move(rho), "werner2");
}

}  // namespace

State make_named(NamedState which) {
  const double r3 = 1.0 / std::sqrt(3.0);
  const double r12 = 1.0 / std::sqrt(12.0);
  const double r6 = 1.0 / std::sqrt(6.0);
  const double r15 = 1.0 / std::sqrt(15.0);
  const double r10 = 1.0 / std::sqrt(10.0);
  switch (which) {
    case NamedState::singlet4:
      return pure_from_terms(4, 2,
                             {{"0011", r3},
                              {"1100", r3},
                              {"0101", -r12},
                              {"0110", -r12},
                              {"1001", -r12},
                              {"1010", -r12}},
                             "singlet4");
    case NamedState::cluster4:
      return pure_from_terms(
          4, 2, {{"0000", 0.5}, {"0011", 0.5}, {"1100", 0.5}, {"1111", -0.5}},
          "cluster4");
    case NamedState::aharonov3:
      // Totally antisymmetric three-qutrit singlet.
      return pure_from_terms(3, 3,
                             {{"012", r6},
                              {"120", r6},
                              {"201", r6},
                              {"021", -r6},
                              {"102", -r6},
                              {"210", -r6}},
                             "aharonov3");
    case NamedState::qutrit_dicke_q1:
      return pure_from_terms(3, 3, {{"001", r3}, {"010", r3}, {"100", r3}},
                             "qutrit_dicke_q1");
    case NamedState::qutrit_dicke_q2:
      return pure_from_terms(3, 3,
                             {{"011", 2 * r15},
                              {"101", 2 * r15},
                              {"110", 2 * r15},
                              {"002", r15},
                              {"020", r15},
                              {"200", r15}},
                             "qutrit_dicke_q2");
    case NamedState::qutrit_dicke_q3:
      return pure_from_terms(3, 3,
                             {{"111", 2 * r10},
                              {"012", r10},
                              {"021", r10},
                              {"102", r10},
                              {"120", r10},
                              {"201", r10},
                              {"210", r10}},
                             "qutrit_dicke_q3");
    case NamedState::smolin4:
      return make_smolin4();
    case NamedState::werner2:
      return make_werner2();
  }
  fail(Errc::invalid_argument, "unknown named state");
}

State tensor(const State& a, const State& b) {
  if (a.local_dim() != b.local_dim())
    fail(Errc::invalid_argument, "tensor: local dimensions differ");
  const std::string descriptor =
      "tensor(" + a.descriptor() + "," + b.descriptor() + ")";
  if (a.is_pure() && b.is_pure()) {
    PureState psi;
    psi.num_parties = a.num_parties() + b.num_parties();
    psi.local_dim = a.local_dim();
    psi.amplitudes.resize(a.dim() * b.dim());
    for (Eigen::Index i = 0; i < a.dim(); ++i)
      psi.amplitudes.segment(i * b.dim(), b.dim()) =
          a.pure_state().amplitudes[i] * b.pure_state().amplitudes;
    return State::pure(std::move(psi), descriptor);
  }
  const Eigen::MatrixXcd& ma = a.density_matrix().entries;
  const Eigen::MatrixXcd& mb = b.density_matrix().entries;
  DensityMatrix rho;
  rho.num_parties = a.num_parties() + b.num_parties();
  rho.local_dim = a.local_dim();
  rho.entries.resize(a.dim() * b.dim(), a.dim() * b.dim());
  for (Eigen::Index i = 0; i < a.dim(); ++i)
    for (Eigen::Index j = 0; j < a.dim(); ++j)
      rho.entries.block(i * b.dim(), j * b.dim(), b.dim(), b.dim()) =
          ma(i, j) * mb;
  return State::mixed(std::move(rho), descriptor);
}

State mix(const std::vector<State>& states, const std::vector<double>& weights) {
  if (states.empty() || states.size() != weights.size())
    fail(Errc::invalid_argument, "mix: need equally many states and weights");
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) fail(Errc::invalid_argument, "mix: weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > kMixWeightTol)
    fail(Errc::invalid_argument, "mix: weights must sum to 1");
  const State& first = states.front();
  DensityMatrix rho;
  rho.num_parties = first.num_parties();
  rho.local_dim = first.local_dim();
  rho.entries = Eigen::MatrixXcd::Zero(first.dim(), first.dim());
  std::string descriptor = "mix(";
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].dim() != first.dim() ||
        states[i].local_dim() != first.local_dim() ||
        states[i].num_parties() != first.num_parties())
      fail(Errc::invalid_argument, "mix: dimension mismatch");
    rho.entries += weights[i] * states[i].density_matrix().entries;
    if (i) descriptor += ',';
    descriptor += fmt_param(weights[i]) + "*" + states[i].descriptor();
  }
  descriptor += ')';
  return State::mixed(std::move(rho), descriptor);
}

State random_pure_state(int num_parties, int local_dim, std::uint64_t seed) {
  if (num_parties < 1 || local_dim < 2)
    fail(Errc::invalid_argument, "random state needs N >= 1 and d >= 2");
  PureState psi;
  psi.num_parties = num_parties;
  psi.local_dim = local_dim;
  psi.amplitudes.resize(pow_dim(local_dim, num_parties));
  RandomStream rng(seed, kStateSamplingStream);
  for (Eigen::Index i = 0; i < psi.amplitudes.size(); ++i) {
    // Box-Muller: one standard complex Gaussian per amplitude.
    const double u1 = 1.0 - rng.next_double();  // (0, 1]
    const double u2 = rng.next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    psi.amplitudes[i] = {r * std::cos(2.0 * std::numbers::pi * u2),
                         r * std::sin(2.0 * std::numbers::pi * u2)};
  }
  psi.amplitudes.normalize();
  return State::pure(std::move(psi),
                     "random(n=" + std::to_string(num_parties) +
                         ",d=" + std::to_string(local_dim) +
                         ",seed=" + std::to_string(seed) + ")");
}

State make_zero(int num_parties, int local_dim) {
  PureState psi;
  psi.num_parties = num_parties;
  psi.local_dim = local_dim;
  psi.amplitudes = Eigen::VectorXcd::Zero(pow_dim(local_dim, num_parties));
  psi.amplitudes[0] = 1.0;
  return State::pure(std::move(psi), "zero(n=" + std::to_string(num_parties) +
                                         ",d=" + std::to_string(local_dim) + ")");
}

State load_density_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open '" + path + "'");
  std::string line;
  long line_no = 0;
  auto next_data_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos) continue;
      if (line[first] == '#') continue;
      return true;
    }
    return false;
  };

  if (!next_data_line())
    fail(Errc::parse_error, path + ": missing header line 'N d'");
  int num_parties = 0, local_dim = 0;
  {
    std::istringstream hdr(line);
    if (!(hdr >> num_parties >> local_dim) || num_parties < 1 || local_dim < 2)
      fail(Errc::parse_error, path + ":" + std::to_string(line_no) +
                                  ": header must be 'N d' with N>=1, d>=2");
  }
  const Eigen::Index dim = pow_dim(local_dim, num_parties);
  DensityMatrix rho;
  rho.num_parties = num_parties;
  rho.local_dim = local_dim;
  rho.entries.resize(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    if (!next_data_line())
      fail(Errc::parse_error,
           path + ": expected " + std::to_string(dim) + " matrix rows, got " +
               std::to_string(r));
    std::istringstream row(line);
    std::string token;
    for (Eigen::Index c = 0; c < dim; ++c) {
      if (!(row >> token))
        fail(Errc::parse_error, path + ":" + std::to_string(line_no) +
                                    ": row has fewer than " +
                                    std::to_string(dim) + " entries");
      rho.entries(r, c) = parse_complex(token);
    }
    if (row >> token)
      fail(Errc::parse_error, path + ":" + std::to_string(line_no) +
                                  ": row has more than " + std::to_string(dim) +
                                  " entries");
  }
  const std::uint64_t content_hash = fnv1a64(
      rho.entries.data(), sizeof(std::complex<double>) * rho.entries.size());
  char tag[32];
  std::snprintf(tag, sizeof(tag), "%016llx",
                static_cast<unsigned long long>(content_hash));
  return State::mixed(std::move(rho), "file(" + std::string(tag) + ")");
}

void save_density_matrix(const DensityMatrix& rho, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(Errc::io_error, "cannot write '" + path + "'");
  out << rho.num_parties << ' ' << rho.local_dim << '\n';
  for (Eigen::Index r = 0; r < rho.entries.rows(); ++r) {
    for (Eigen::Index c = 0; c < rho.entries.cols(); ++c) {
      if (c) out << ' ';
      out << format_complex(rho.entries(r, c));
    }
    out << '\n';
  }
  if (!out) fail(Errc::io_error, "write to '" + path + "' failed");
}

}  // namespace pvbell
