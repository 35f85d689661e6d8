//! Exact-arithmetic invariants of rank-2 bundles near a negative rational curve.
//!
//! Let `Z_k` be the total space of `O(-k)` over the projective line, with zero
//! section `ell` of self-intersection `-k`, and let `pi: Z_k -> X_k` contract
//! `ell` to the singular point of the cone `X_k`.  A holomorphic rank-2 bundle
//! `E` on `Z_k` with vanishing first Chern class and splitting type `j` is an
//! extension of `O(j)` by `O(-j)`, determined by a transition matrix
//!
//! ```text
//!     [ z^j   p(z,u) ]
//!     [ 0     z^-j   ]
//! ```
//!
//! where the extension class `p` is a bivariate Laurent polynomial in a
//! canonical window.  This crate computes, over exact rationals:
//!
//! * the **height** `h_k(E) = length R^1 pi_* E`, as the dimension of a Cech
//!   cohomology quotient on an infinitesimal neighbourhood of `ell`
//!   ([`height::height`]);
//! * the **width** `w_k(E) = length ( (pi_* E)^vv / pi_* E )`, as the
//!   codimension of the section module inside its double dual over the cone
//!   ring ([`width::width`]);
//! * the **local holomorphic Euler characteristic** `chi = h + w`, together
//!   with sharp bounds and charge-gap checks ([`invariants`]);
//! * moduli-stratum scans over coefficient grids, the scaling action, the
//!   embedding `(j, p) -> (j + k, z^k u^2 p)`, and the rank-r balancing
//!   algorithm with its admissible sequences ([`invariants`], [`balance`]).
//!
//! All linear algebra is exact over `Q` ([`linalg`]); no floating point enters
//! any computation.  The invariants in scope are dimensions of kernels and
//! cokernels of matrices whose entries are polynomial in the input data, so
//! for rational inputs the dimensions over `Q` agree with those over `C`.
//!
//! # Example
//!
//! ```
//! use negcurve::bundle::BundleSpec;
//! use negcurve::invariants::invariants;
//! use negcurve::surface::LaurentPoly2;
//!
//! // On Z_2, splitting type 3, extension class p = z*u.
//! let p: LaurentPoly2 = "z*u".parse().unwrap();
//! let b = BundleSpec::new(2, 3, p).unwrap();
//! let report = invariants(&b).unwrap();
//! assert_eq!((report.height, report.width, report.chi), (2, 0, 2));
//! ```

pub mod balance;
pub mod bundle;
pub mod error;
pub mod height;
pub mod invariants;
pub mod linalg;
pub mod surface;
pub mod width;

pub use error::Error;
pub use linalg::Rat;

// Run every Rust snippet in the guide as a doc-test, so the book stays in
// sync with the library.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }

    chapter!(ch_surface, "../../../book/src/surface.md");
    chapter!(ch_bundles, "../../../book/src/bundles.md");
    chapter!(ch_height, "../../../book/src/height.md");
    chapter!(ch_width, "../../../book/src/width.md");
    chapter!(ch_euler, "../../../book/src/euler.md");
    chapter!(ch_balancing, "../../../book/src/balancing.md");
    chapter!(ch_moduli, "../../../book/src/moduli.md");
}
