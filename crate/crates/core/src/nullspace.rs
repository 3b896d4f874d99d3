//! Nullspace AN designs.
//!
//! Restricting the AN to the nullspace of the reader→tag channel (NBS-AN)
//! removes the backscattered AN everywhere; restricting it to the nullspace
//! of the self-interference channel (NSI-AN) removes the self-interference.
//! Either way `Λ = V W V^H` with orthonormal `V`, so `Tr Λ = Tr W` and the
//! reduced problem over `(P_s, W)` has exactly the structure of the full one.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::model::{Instance, Solution, SystemChannels};
use crate::solver::{solve_srm_in, AnSubspace, SolverConfig, SolverReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NullspaceKind {
    /// AN nulled at the tag (`H_tp^H V = 0`).
    NoBackscatter,
    /// AN nulled on the self-interference path (`H_tr V = 0`).
    NoSelfInterference,
}

impl fmt::Display for NullspaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NullspaceKind::NoBackscatter => "nbs_an",
            NullspaceKind::NoSelfInterference => "nsi_an",
        })
    }
}

impl NullspaceKind {
    pub fn channel<'a>(&self, ch: &'a SystemChannels) -> &'a CMat {
        match self {
            NullspaceKind::NoBackscatter => &ch.h_reader_to_tag,
            NullspaceKind::NoSelfInterference => &ch.h_self_interference,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NullspaceBasis {
    /// `M×r`, orthonormal columns.
    pub v_basis: CMat,
    pub kind: NullspaceKind,
}

impl NullspaceBasis {
    pub fn rank(&self) -> usize {
        self.v_basis.ncols()
    }

    /// `‖H V‖_F` for the channel being nulled.
    pub fn residual(&self, ch: &SystemChannels) -> f64 {
        (self.kind.channel(ch) * &self.v_basis).norm()
    }
}

/// Orthonormal basis of the right nullspace of the channel selected by `kind`.
///
/// The channel is assumed to have full row rank, so the nullspace dimension is
/// `M - rows` and the basis is taken by index: the top `M - rows` eigenvectors
/// of the projector `I - Q Q^H`, where `Q` spans the row space.
pub fn nullspace_basis(ch: &SystemChannels, kind: NullspaceKind) -> Result<NullspaceBasis> {
    let h = kind.channel(ch);
    let (rows, m) = h.shape();
    if m <= rows {
        let (lhs, rhs) = match kind {
            NullspaceKind::NoBackscatter => ("M > L", "L"),
            NullspaceKind::NoSelfInterference => ("M > N", "N"),
        };
        return Err(Error::Unsupported(format!(
            "{kind} requires {lhs} (got M = {m}, {rhs} = {rows})"
        )));
    }
    let r = m - rows;
    let q = h.adjoint().qr().q();
    let projector = linalg::identity(m) - &q * q.adjoint();
    let eig = linalg::eigh(&projector);
    let v_basis = eig.vectors.columns(0, r).into_owned();
    let basis = NullspaceBasis { v_basis, kind };
    let residual = basis.residual(ch);
    if residual > 1e-8 * h.norm() {
        return Err(Error::Unsupported(format!(
            "{kind}: channel is rank deficient (nullspace residual {residual:e})"
        )));
    }
    Ok(basis)
}

#[derive(Debug, Clone)]
pub struct NullspaceReport {
    pub report: SolverReport,
    pub basis: NullspaceBasis,
}

impl NullspaceReport {
    /// The optimized `W`.
    pub fn reduced_cov(&self) -> &CMat {
        self.report.reduced.as_ref().expect("nullspace solves keep W")
    }
}

/// Solves the SRM problem with `Λ = V W V^H`, started from all power on the
/// carrier.
///
/// On this set the nulled interference term is identically zero, so it is
/// dropped from the iteration (`α = 0` for NBS-AN, `β = 0` for NSI-AN) rather
/// than carried as rounding noise. The solution therefore does not depend on
/// the dropped factor at all. Final rates are evaluated on `inst`.
pub fn solve_srm_nullspace(inst: &Instance, kind: NullspaceKind, cfg: &SolverConfig) -> Result<NullspaceReport> {
    let basis = nullspace_basis(&inst.channels, kind)?;
    let mut params = inst.params.clone();
    match kind {
        NullspaceKind::NoBackscatter => params.alpha = 0.0,
        NullspaceKind::NoSelfInterference => params.beta = 0.0,
    }
    let reduced_inst = inst.with_params(params)?;
    let init = Solution::no_an(inst.params.total_power, basis.rank());
    let mut report = solve_srm_in(&reduced_inst, &AnSubspace::Basis(basis.v_basis.clone()), &init, cfg)?;
    report.rates = inst.rates(&report.solution)?;
    Ok(NullspaceReport { report, basis })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;

    fn channels(m: usize, l: usize, n: usize, tag: CMat) -> SystemChannels {
        let f = |r: usize, c: usize, s: f64| CMat::from_fn(r, c, |i, j| C64::new((i + 2 * j) as f64 * s + 1.0, (i * j) as f64 - s));
        SystemChannels {
            h_reader_to_tag: tag,
            h_tag_to_reader: f(n, l, 0.3),
            h_self_interference: f(n, m, 0.7),
            h_tag_to_eve: f(2, l, 0.1),
            h_reader_to_eve: f(2, m, 0.2),
        }
    }

    #[test]
    fn zero_column_lies_in_nullspace() {
        let mut tag = CMat::from_fn(2, 3, |i, j| C64::new(1.0 + i as f64, j as f64 - 0.5 * i as f64));
        tag.column_mut(2).fill(C64::new(0.0, 0.0));
        let ch = channels(3, 2, 2, tag);
        let b = nullspace_basis(&ch, NullspaceKind::NoBackscatter).unwrap();
        assert_eq!(b.rank(), 1);
        assert!((b.v_basis[(2, 0)].norm() - 1.0).abs() < 1e-12);
        assert!(b.residual(&ch) < 1e-12);
    }

    #[test]
    fn square_channel_is_unsupported() {
        let tag = CMat::from_fn(2, 2, |i, j| C64::new((i + j) as f64, 1.0));
        let ch = channels(2, 2, 2, tag);
        let err = nullspace_basis(&ch, NullspaceKind::NoBackscatter).unwrap_err();
        assert!(err.to_string().contains("M > L"), "{err}");
        let err = nullspace_basis(&ch, NullspaceKind::NoSelfInterference).unwrap_err();
        assert!(err.to_string().contains("M > N"), "{err}");
    }

    #[test]
    fn basis_is_orthonormal() {
        let tag = CMat::from_fn(1, 4, |i, j| C64::new(1.0 + j as f64, i as f64 - 0.3 * j as f64));
        let ch = channels(4, 1, 2, tag);
        for kind in [NullspaceKind::NoBackscatter, NullspaceKind::NoSelfInterference] {
            let b = nullspace_basis(&ch, kind).unwrap();
            let gram = b.v_basis.adjoint() * &b.v_basis;
            assert!((gram - linalg::identity(b.rank())).norm() < 1e-12);
        }
    }
}
