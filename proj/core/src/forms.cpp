#include "ahe/forms.hpp"

namespace ahe {

PQForm::PQForm(const AffineManifold& m, int p, int q, int payload, BundleLaw law, const Monodromy* rho)
    : m_(&m), p_(p), q_(q), payload_(payload), law_(law), rho_(rho),
      itable_(m.dim(), p), jtable_(m.dim(), q) {
  if (p < 0 || q < 0 || p > m.dim() || q > m.dim()) fail("DegreeOverflow", "bidegree outside [0,n]");
  if (payload_ < 1) fail("BadForm", "payload dimension must be >= 1");
  bool needs_rho = law_ == BundleLaw::Endomorphism || law_ == BundleLaw::MetricLike;
  if (needs_rho && rho_ == nullptr) fail("BadForm", "bundle-valued transport requires a monodromy");
  if (needs_rho && rho_->rank() != payload_)
    fail("BadForm", "payload dimension must match the bundle rank");
  m.ensure_ghost_table();  // before any threaded sweep touches ghosts
  data_.assign(static_cast<std::size_t>(m.npoints()) * nslots() * payload_ * payload_, cplx(0, 0));
  transport_cache_.resize(m.word_count());
}

PQForm PQForm::function(const AffineManifold& m, const std::function<cplx(const VectorXd&)>& f) {
  PQForm out(m, 0, 0);
  for (long pt = 0; pt < m.npoints(); ++pt) out.at(pt, 0)(0, 0) = f(m.point(pt));
  return out;
}

PQForm PQForm::twisted_scalar(const AffineManifold& m, const VectorXd& addend_per_generator,
                              const std::function<cplx(const VectorXd&)>& f) {
  if (addend_per_generator.size() != m.generator_count())
    fail("BadForm", "one additive constant per generator required");
  PQForm out(m, 0, 0, 1, BundleLaw::AdditiveCharacter, nullptr);
  out.addends_ = addend_per_generator;
  for (long pt = 0; pt < m.npoints(); ++pt) out.at(pt, 0)(0, 0) = f(m.point(pt));
  return out;
}

const PQForm::Transport& PQForm::transport(int word_id) const {
  if (word_id >= static_cast<int>(transport_cache_.size()))
    transport_cache_.resize(m_->word_count());
  auto& slot = transport_cache_[word_id];
  if (!slot) {
    Transport t;
    const AffineMap& w = m_->word_map(word_id);
    MatrixXd b = w.A.inverse().transpose();
    int n = m_->dim();
    t.trivial_form = (b - MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-14;
    t.lam_p = compound_matrix(MatrixXcd(b.cast<cplx>()), p_);
    t.lam_q = compound_matrix(MatrixXcd(b.cast<cplx>()), q_);
    t.addend = 0.0;
    if (law_ == BundleLaw::AdditiveCharacter) {
      for (auto [gi, sign] : m_->word_letters(word_id)) t.addend += sign * addends_(gi);
      t.trivial_payload = true;
      t.left = t.right = MatrixXcd::Identity(payload_, payload_);
    } else if (law_ == BundleLaw::None) {
      t.trivial_payload = true;
      t.left = t.right = MatrixXcd::Identity(payload_, payload_);
    } else {
      MatrixXcd rw = rho_->word_matrix(m_->word_letters(word_id));
      MatrixXcd rwi = rw.inverse();
      if (law_ == BundleLaw::Endomorphism) {
        t.left = rw;
        t.right = rwi;
      } else {  // MetricLike
        t.left = rwi.adjoint();
        t.right = rwi;
      }
      t.trivial_payload =
          (t.left - MatrixXcd::Identity(payload_, payload_)).cwiseAbs().maxCoeff() < 1e-14 &&
          (t.right - MatrixXcd::Identity(payload_, payload_)).cwiseAbs().maxCoeff() < 1e-14;
    }
    slot = std::move(t);
  }
  return *slot;
}

void PQForm::neighbor_slots(long pt, int axis, int offset, std::vector<MatrixXcd>& out) const {
  auto ghost = m_->neighbor(pt, axis, offset);
  int ns = nslots();
  out.resize(ns);
  if (ghost.word_id == 0) {
    for (int s = 0; s < ns; ++s) out[s] = at(ghost.point_index, s);
    return;
  }
  const Transport& t = transport(ghost.word_id);
  // payload transform first
  std::vector<MatrixXcd> base(ns);
  for (int s = 0; s < ns; ++s) {
    if (t.trivial_payload)
      base[s] = at(ghost.point_index, s);
    else
      base[s] = t.left * at(ghost.point_index, s) * t.right;
  }
  if (law_ == BundleLaw::AdditiveCharacter) base[0].array() += t.addend;
  if (t.trivial_form) {
    out = std::move(base);
    return;
  }
  int ni = islots(), nj = jslots();
  for (int a = 0; a < ni; ++a) {
    for (int bslot = 0; bslot < nj; ++bslot) {
      MatrixXcd acc = MatrixXcd::Zero(payload_, payload_);
      for (int a2 = 0; a2 < ni; ++a2) {
        cplx ci = t.lam_p(a, a2);
        if (std::abs(ci) < 1e-300) continue;
        for (int b2 = 0; b2 < nj; ++b2) {
          cplx cj = t.lam_q(bslot, b2);
          if (std::abs(ci * cj) < 1e-300) continue;
          acc += (ci * cj) * base[a2 * nj + b2];
        }
      }
      out[a * nj + bslot] = std::move(acc);
    }
  }
}

double PQForm::sup_abs() const {
  double worst = 0.0;
  for (const auto& v : data_) worst = std::max(worst, std::abs(v));
  return worst;
}

double PQForm::max_imag() const {
  double worst = 0.0;
  for (const auto& v : data_) worst = std::max(worst, std::abs(v.imag()));
  return worst;
}

PQForm& PQForm::operator+=(const PQForm& other) {
  if (p_ != other.p_ || q_ != other.q_ || payload_ != other.payload_ || m_ != other.m_)
    fail("BadForm", "form shape mismatch in addition");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

PQForm& PQForm::operator*=(cplx scale) {
  for (auto& v : data_) v *= scale;
  return *this;
}

namespace {

// Shared implementation of the two Dolbeault operators. `into_first` selects
// the index group receiving the derivative index; the dbar operator carries
// the extra (-1)^p sign.
PQForm dolbeault_impl(const PQForm& f, bool into_first) {
  const AffineManifold& m = f.manifold();
  int n = m.dim();
  int N = m.resolution();
  int p_out = f.p() + (into_first ? 1 : 0);
  int q_out = f.q() + (into_first ? 0 : 1);
  if (p_out > n || q_out > n) fail("DegreeOverflow", "derivative exceeds top degree");
  // The additive character is killed by differentiation; the derivative of a
  // twisted scalar is a plain tensor.
  BundleLaw out_law = f.law() == BundleLaw::AdditiveCharacter ? BundleLaw::None : f.law();
  PQForm out(m, p_out, q_out, f.payload(), out_law, f.rho());

  double h = 1.0 / N;
  double sign_all = into_first ? 1.0 : ((f.p() % 2 == 0) ? 1.0 : -1.0);

  const MultiIndexTable& src_tab = into_first ? f.itable() : f.jtable();
  const MultiIndexTable& dst_tab = into_first ? out.itable() : out.jtable();
  const MultiIndexTable& other_tab = into_first ? f.jtable() : f.itable();

  // Precompute insertion targets: (axis, src subset) -> (sign, dst subset).
  int ns_src = src_tab.size();
  std::vector<std::vector<std::pair<int, int>>> ins(n, std::vector<std::pair<int, int>>(ns_src, {0, -1}));
  for (int axis = 0; axis < n; ++axis)
    for (int s = 0; s < ns_src; ++s) {
      auto [sg, merged] = MultiIndexTable::merge({axis}, src_tab.subset(s));
      if (sg != 0) ins[axis][s] = {sg, dst_tab.index_of(merged)};
    }

  long npts = m.npoints();
  int n_other = other_tab.size();

#pragma omp parallel
  {
    std::vector<MatrixXcd> nb_m2, nb_m1, nb_p1, nb_p2;
#pragma omp for schedule(static)
    for (long pt = 0; pt < npts; ++pt) {
      VectorXi k = m.coords_of(pt);
      for (int axis = 0; axis < n; ++axis) {
        // 4th-order central difference along `axis` of every slot.
        bool interior = k(axis) >= 2 && k(axis) < N - 2;
        const cplx* m2;
        const cplx* m1;
        const cplx* p1;
        const cplx* p2;
        if (interior) {
          long step = 1;
          for (int i = 0; i < axis; ++i) step *= N;
          int pp = f.payload() * f.payload();
          const cplx* base0 = f.raw(pt, 0);
          m2 = base0 - 2 * step * f.nslots() * pp;
          m1 = base0 - 1 * step * f.nslots() * pp;
          p1 = base0 + 1 * step * f.nslots() * pp;
          p2 = base0 + 2 * step * f.nslots() * pp;
        } else {
          f.neighbor_slots(pt, axis, -2, nb_m2);
          f.neighbor_slots(pt, axis, -1, nb_m1);
          f.neighbor_slots(pt, axis, +1, nb_p1);
          f.neighbor_slots(pt, axis, +2, nb_p2);
          m2 = m1 = p1 = p2 = nullptr;
        }
        for (int s_src = 0; s_src < ns_src; ++s_src) {
          auto [sg, s_dst] = ins[axis][s_src];
          if (s_dst < 0) continue;
          double c = sign_all * sg / (12.0 * h);
          for (int s_other = 0; s_other < n_other; ++s_other) {
            int slot_in = into_first ? s_src * n_other + s_other : s_other * ns_src + s_src;
            int slot_out = into_first ? s_dst * out.jslots() + s_other : s_other * out.jslots() + s_dst;
            MatrixXcd deriv;
            if (interior) {
              int pp = f.payload() * f.payload();
              auto mm2 = Eigen::Map<const MatrixXcd>(m2 + slot_in * pp, f.payload(), f.payload());
              auto mm1 = Eigen::Map<const MatrixXcd>(m1 + slot_in * pp, f.payload(), f.payload());
              auto mp1 = Eigen::Map<const MatrixXcd>(p1 + slot_in * pp, f.payload(), f.payload());
              auto mp2 = Eigen::Map<const MatrixXcd>(p2 + slot_in * pp, f.payload(), f.payload());
              deriv = (-mp2 + 8.0 * mp1 - 8.0 * mm1 + mm2);
            } else {
              deriv = (-nb_p2[slot_in] + 8.0 * nb_p1[slot_in] - 8.0 * nb_m1[slot_in] + nb_m2[slot_in]);
            }
            out.at(pt, slot_out) += c * deriv;
          }
        }
      }
    }
  }
  return out;
}

}  // namespace

PQForm dolbeault_d(const PQForm& f) { return dolbeault_impl(f, true); }

PQForm dolbeault_dbar(const PQForm& f) { return dolbeault_impl(f, false); }

PQForm dolbeault_ddbar(const PQForm& f) { return dolbeault_d(dolbeault_dbar(f)); }

PQForm wedge(const PQForm& a, const PQForm& b) {
  if (&a.manifold() != &b.manifold()) fail("BadForm", "wedge across different manifolds");
  const AffineManifold& m = a.manifold();
  int n = m.dim();
  int p = a.p() + b.p(), q = a.q() + b.q();
  if (p > n || q > n) fail("DegreeOverflow", "wedge exceeds top degree");

  int payload = 1;
  BundleLaw law = BundleLaw::None;
  const Monodromy* rho = nullptr;
  if (a.payload() > 1 && b.payload() > 1) {
    if (a.payload() != b.payload()) fail("BadForm", "payload dimension mismatch in wedge");
    payload = a.payload();
    law = BundleLaw::Endomorphism;
    rho = a.rho() ? a.rho() : b.rho();
  } else if (a.payload() > 1) {
    payload = a.payload();
    law = a.law();
    rho = a.rho();
  } else if (b.payload() > 1) {
    payload = b.payload();
    law = b.law();
    rho = b.rho();
  }
  PQForm out(m, p, q, payload, law, rho);

  // Precompute merge tables between the two factors' slots.
  struct MergeEntry {
    int sign;
    int dst;
  };
  int nia = a.islots(), nja = a.jslots(), nib = b.islots(), njb = b.jslots();
  std::vector<MergeEntry> imerge(nia * nib), jmerge(nja * njb);
  for (int s1 = 0; s1 < nia; ++s1)
    for (int s2 = 0; s2 < nib; ++s2) {
      auto [sg, merged] = MultiIndexTable::merge(a.itable().subset(s1), b.itable().subset(s2));
      imerge[s1 * nib + s2] = {sg, sg != 0 ? out.itable().index_of(merged) : -1};
    }
  for (int s1 = 0; s1 < nja; ++s1)
    for (int s2 = 0; s2 < njb; ++s2) {
      auto [sg, merged] = MultiIndexTable::merge(a.jtable().subset(s1), b.jtable().subset(s2));
      jmerge[s1 * njb + s2] = {sg, sg != 0 ? out.jtable().index_of(merged) : -1};
    }

  long npts = m.npoints();
#pragma omp parallel for schedule(static)
  for (long pt = 0; pt < npts; ++pt) {
    for (int ia = 0; ia < nia; ++ia)
      for (int ib = 0; ib < nib; ++ib) {
        const MergeEntry& me = imerge[ia * nib + ib];
        if (me.sign == 0) continue;
        for (int ja = 0; ja < nja; ++ja)
          for (int jb = 0; jb < njb; ++jb) {
            const MergeEntry& mj = jmerge[ja * njb + jb];
            if (mj.sign == 0) continue;
            double sg = me.sign * mj.sign;
            auto va = a.at(pt, ia * nja + ja);
            auto vb = b.at(pt, ib * njb + jb);
            int dst = me.dst * out.jslots() + mj.dst;
            if (a.payload() == 1 && b.payload() == 1)
              out.at(pt, dst)(0, 0) += sg * va(0, 0) * vb(0, 0);
            else if (a.payload() == 1)
              out.at(pt, dst) += (sg * va(0, 0)) * vb;
            else if (b.payload() == 1)
              out.at(pt, dst) += (sg * vb(0, 0)) * va;
            else
              out.at(pt, dst) += sg * (va * vb).eval();
          }
      }
  }
  return out;
}

PQForm omega_form(const AffineManifold& m, const MetricField& g) {
  int n = m.dim();
  PQForm w(m, 1, 1);
  for (long pt = 0; pt < m.npoints(); ++pt) {
    MatrixXd gm = g.at(pt);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) w.at(pt, i * n + j)(0, 0) = gm(i, j);
  }
  return w;
}

PQForm omega_power(const AffineManifold& m, const MetricField& g, int k) {
  if (k < 0 || k > m.dim()) fail("DegreeOverflow", "omega power outside [0,n]");
  if (k == 0) {
    PQForm one(m, 0, 0);
    for (long pt = 0; pt < m.npoints(); ++pt) one.at(pt, 0)(0, 0) = 1.0;
    return one;
  }
  PQForm w = omega_form(m, g);
  PQForm acc = w;
  for (int i = 1; i < k; ++i) acc = wedge(acc, w);
  return acc;
}

cplx integrate_over_nu(const PQForm& top) {
  const AffineManifold& m = top.manifold();
  if (top.p() != m.dim() || top.q() != m.dim())
    fail("WrongDegree", "integration requires an (n,n)-form");
  if (top.payload() != 1) fail("WrongDegree", "integration requires a scalar form");
  cplx sum = 0.0;
  for (long pt = 0; pt < m.npoints(); ++pt) sum += top.scalar_at(pt, 0);
  return sum / static_cast<double>(m.npoints());  // unit fundamental domain
}

double check_gauduchon(const AffineManifold& m, const MetricField& g) {
  int n = m.dim();
  if (n == 1) return 0.0;  // omega^0 is constant
  PQForm w = omega_power(m, g, n - 1);
  return dolbeault_ddbar(w).sup_abs();
}

double check_astheno(const AffineManifold& m, const MetricField& g) {
  int n = m.dim();
  if (n <= 2) return 0.0;  // omega^0 (d=2) or vacuous (d=1)
  PQForm w = omega_power(m, g, n - 2);
  return dolbeault_ddbar(w).sup_abs();
}

}  // namespace ahe
