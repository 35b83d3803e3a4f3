#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "repsim/gadgets.hpp"
#include "repsim/observables.hpp"
#include "repsim/rep_code.hpp"
#include "repsim/state_vector.hpp"

namespace repsim {

enum class Variant : uint8_t { Bare, Encoded, EncodedEc };

inline const char* variant_name(Variant v) {
  switch (v) {
    case Variant::Bare: return "bare";
    case Variant::Encoded: return "encoded";
    case Variant::EncodedEc: return "encoded_ec";
  }
  return "?";
}

inline std::optional<Variant> parse_variant(const std::string& s) {
  if (s == "bare") return Variant::Bare;
  if (s == "encoded") return Variant::Encoded;
  if (s == "encoded_ec" || s == "encoded-with-ec" || s == "encoded_with_ec")
    return Variant::EncodedEc;
  return std::nullopt;
}

// Compiles logical operations onto physical qubits. Bare circuits map one
// logical qubit to one physical qubit and use native rotations. Encoded
// circuits hold each logical qubit in a distance-3 block, keep one spare
// block for teleportation resources / rotation ancillas, and recycle a single
// measurement ancilla. Teleportation moves the logical qubit into the spare
// block and frees the old one.
class LogicalCompiler {
public:
  LogicalCompiler(Circuit& c, int n_logical, Variant variant,
                  PostselectRule rule = PostselectRule::DiscardQ1Signature,
                  bool ec_after_h = false)
      : c_(c), n_(n_logical), variant_(variant), rule_(rule), ec_after_h_(ec_after_h) {
    if (variant_ == Variant::Bare) {
      c_.require_qubits(n_);
      for (int i = 0; i < n_; ++i) c_.prep0(i);
    } else {
      c_.require_qubits(3 * (n_ + 1) + 1);
      for (int i = 0; i < n_; ++i) {
        blocks_.push_back(CodeBlock{{3 * i, 3 * i + 1, 3 * i + 2}});
        for (int q : blocks_[i].q) c_.prep0(q);
      }
      spare_ = CodeBlock{{3 * n_, 3 * n_ + 1, 3 * n_ + 2}};
      anc_ = 3 * (n_ + 1);
      c_.prep0(anc_);
    }
  }

  bool encoded() const { return variant_ != Variant::Bare; }
  const CodeBlock& block(int logical) const { return blocks_.at(logical); }
  int ancilla() const { return anc_; }

  void x(int l) { encoded() ? append_logical_x(c_, blocks_[l]) : (void)c_.add(Gate::x(l)); }
  void y(int l) { encoded() ? append_logical_y(c_, blocks_[l]) : (void)c_.add(Gate::y(l)); }
  void z(int l) { encoded() ? append_logical_z(c_, blocks_[l]) : (void)c_.add(Gate::z(l)); }

  void cnot(int lc, int lt) {
    if (encoded())
      append_logical_cnot(c_, blocks_[lc], blocks_[lt]);
    else
      c_.add(Gate::cnot(lc, lt));
  }

  void cz(int l1, int l2) {
    if (encoded())
      append_logical_cz(c_, blocks_[l1], blocks_[l2], anc_, rule_);
    else
      c_.add(Gate::cz(l1, l2));
  }

  void s(int l, int sign = +1) {
    if (!encoded()) {
      c_.add(sign >= 0 ? Gate::s(l) : Gate::sdg(l));
      return;
    }
    append_s_teleport(c_, blocks_[l], spare_, anc_, sign);
    std::swap(blocks_[l], spare_);
  }

  void h(int l) {
    if (!encoded()) {
      c_.add(Gate::h(l));
      return;
    }
    append_h_teleport(c_, blocks_[l], spare_, anc_, rule_);
    std::swap(blocks_[l], spare_);
    if (ec_after_h_ && variant_ == Variant::EncodedEc) ec(l);
  }

  void rz(int l, double theta) {
    if (!encoded()) {
      c_.add(Gate::rz(l, theta));
      return;
    }
    append_rz_gadget(c_, blocks_[l], spare_, anc_, theta, rule_);
  }

  // Bare circuits use native rotations; encoded ones decompose through the
  // fault-tolerant H / S gadgets.
  void rx(int l, double theta) {
    if (!encoded()) {
      c_.add(Gate::rx(l, theta));
      return;
    }
    for (const auto& op : rotation_decompose(LogicalOpKind::RxL, l, theta)) apply(op);
  }

  void ry(int l, double theta) {
    if (!encoded()) {
      c_.add(Gate::ry(l, theta));
      return;
    }
    for (const auto& op : rotation_decompose(LogicalOpKind::RyL, l, theta)) apply(op);
  }

  void apply(const LogicalOpSpec& op) {
    switch (op.kind) {
      case LogicalOpKind::XL: x(op.blocks[0]); break;
      case LogicalOpKind::YL: y(op.blocks[0]); break;
      case LogicalOpKind::ZL: z(op.blocks[0]); break;
      case LogicalOpKind::HL: h(op.blocks[0]); break;
      case LogicalOpKind::SL: s(op.blocks[0], +1); break;
      case LogicalOpKind::SdgL: s(op.blocks[0], -1); break;
      case LogicalOpKind::RzL: rz(op.blocks[0], op.theta); break;
      case LogicalOpKind::RxL: rx(op.blocks[0], op.theta); break;
      case LogicalOpKind::RyL: ry(op.blocks[0], op.theta); break;
      case LogicalOpKind::CnotL: cnot(op.blocks[0], op.blocks[1]); break;
      case LogicalOpKind::CzL: cz(op.blocks[0], op.blocks[1]); break;
      default: throw std::invalid_argument("unsupported logical op");
    }
  }

  // Two-round error correction on a logical qubit.
  void ec(int l) {
    if (!encoded()) return;
    append_error_correct(c_, blocks_[l], anc_, 2);
  }

  // Measurement-basis rotation before a Z readout: X basis needs H, Y basis
  // needs Sdg then H.
  void basis_rotation(int l, MeasBasis b) {
    if (b == MeasBasis::Z) return;
    if (b == MeasBasis::Y) s(l, -1);
    h(l);
  }

  // Probability distribution over decoded logical outcomes, read from the
  // final state: majority vote per block, direct bits when bare.
  std::vector<double> decoded_distribution(const StateVector& st) const {
    size_t nl = static_cast<size_t>(n_);
    std::vector<double> dist(size_t{1} << nl, 0.0);
    for (size_t idx = 0; idx < st.dim(); ++idx) {
      double w = std::norm(st[idx]);
      if (w == 0) continue;
      size_t out = 0;
      for (size_t l = 0; l < nl; ++l) {
        int bit;
        if (encoded()) {
          int ones = 0;
          for (int q : blocks_[l].q) ones += (idx >> q) & 1;
          bit = ones >= 2;
        } else {
          bit = (idx >> l) & 1;
        }
        out |= static_cast<size_t>(bit) << l;
      }
      dist[out] += w;
    }
    return dist;
  }

  // Decoded expectation of sum_l Z_l.
  double decoded_magnetization(const StateVector& st) const {
    auto dist = decoded_distribution(st);
    double m = 0;
    for (size_t o = 0; o < dist.size(); ++o) {
      int val = 0;
      for (int l = 0; l < n_; ++l) val += ((o >> l) & 1) ? -1 : 1;
      m += dist[o] * val;
    }
    return m;
  }

private:
  Circuit& c_;
  int n_;
  Variant variant_;
  PostselectRule rule_;
  bool ec_after_h_;
  std::vector<CodeBlock> blocks_;
  CodeBlock spare_;
  int anc_ = -1;
};

}  // namespace repsim
