#include "sedlab/model.hpp"

#include <cmath>
#include <limits>

namespace sedlab {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_in_box(const Box& b, double x) {
  if (!(x >= 0.0 && x <= b.length)) {
    throw DomainError("position " + std::to_string(x) + " outside box [0, " +
                      std::to_string(b.length) + "]");
  }
}

}  // namespace

PhysicalParams::PhysicalParams(double mass, double hbar, double tau, double cutoff)
    : mass_(mass), hbar_(hbar), tau_(tau), cutoff_(cutoff) {
  if (!(mass > 0.0)) throw std::invalid_argument("mass must be > 0");
  if (!(hbar > 0.0)) throw std::invalid_argument("hbar must be > 0");
  if (!(tau >= 0.0)) throw std::invalid_argument("tau must be >= 0");
  if (!(cutoff > 0.0)) throw std::invalid_argument("cutoff must be > 0");
}

Potential::Potential(Variant v) : v_(v) {
  std::visit(Overloaded{
                 [](const Harmonic& h) {
                   if (!(h.omega0 > 0.0)) throw std::invalid_argument("omega0 must be > 0");
                 },
                 [](const Quartic& q) {
                   if (!(q.k > 0.0)) throw std::invalid_argument("quartic k must be > 0");
                 },
                 [](const Box& b) {
                   if (!(b.length > 0.0)) throw std::invalid_argument("box length must be > 0");
                 },
                 [](const Free&) {},
             },
             v_);
}

double Potential::value(double x, double mass) const {
  return std::visit(Overloaded{
                        [&](const Harmonic& h) { return 0.5 * mass * h.omega0 * h.omega0 * x * x; },
                        [&](const Quartic& q) { return q.k * x * x * x * x; },
                        [&](const Box& b) {
                          require_in_box(b, x);
                          return 0.0;
                        },
                        [](const Free&) { return 0.0; },
                    },
                    v_);
}

bool Potential::in_domain(double x) const {
  if (const auto* b = get_if<Box>()) return x >= 0.0 && x <= b->length;
  return std::isfinite(x);
}

bool Potential::confining() const { return !std::holds_alternative<Free>(v_); }

std::string Potential::name() const {
  return std::visit(Overloaded{
                        [](const Harmonic&) { return std::string("harmonic"); },
                        [](const Quartic&) { return std::string("quartic"); },
                        [](const Box&) { return std::string("box"); },
                        [](const Free&) { return std::string("free"); },
                    },
                    v_);
}

double force(const Potential& potential, const PhysicalParams& params, double x) {
  const double m = params.mass();
  return std::visit(Overloaded{
                        [&](const Harmonic& h) { return -m * h.omega0 * h.omega0 * x; },
                        [&](const Quartic& q) { return -4.0 * q.k * x * x * x; },
                        [&](const Box& b) {
                          require_in_box(b, x);
                          return 0.0;
                        },
                        [](const Free&) { return 0.0; },
                    },
                    potential.variant());
}

double force_gradient(const Potential& potential, const PhysicalParams& params, double x) {
  const double m = params.mass();
  return std::visit(Overloaded{
                        [&](const Harmonic& h) { return -m * h.omega0 * h.omega0; },
                        [&](const Quartic& q) { return -12.0 * q.k * x * x; },
                        [&](const Box& b) {
                          require_in_box(b, x);
                          return 0.0;
                        },
                        [](const Free&) { return 0.0; },
                    },
                    potential.variant());
}

}  // namespace sedlab
