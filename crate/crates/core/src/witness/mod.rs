//! Explicit linear-algebra witnesses: rebasing automorphisms, standard and
//! isotropic extensions, and the exceptional orthogonal isomorphism.

pub mod bd;
pub mod bundle;
pub mod extension;
pub mod rebase;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{Field, Form, Matrix, Subspace};

pub use bd::{bd_phi, bd_square_check, BdReport, BdSample};
pub use extension::{
    check_triangle, compose_standard_extensions, exhaustion_step, is_ample, is_linear,
    isotropic_extension, pic_pullback, PicPullback, StandardExtension, TriangleReport,
};
pub use rebase::rebase_automorphism;

/// A point of a finite flag variety: a strictly increasing chain of
/// subspaces of `F^ambient`, optionally with a form for which every member
/// is isotropic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteFlagPoint<F: Field> {
    ambient: usize,
    members: Vec<Subspace<F>>,
    form: Option<Form<F>>,
}

impl<F: Field> FiniteFlagPoint<F> {
    pub fn new(ambient: usize, members: Vec<Subspace<F>>, form: Option<Form<F>>) -> Result<Self> {
        for (i, s) in members.iter().enumerate() {
            if s.ambient() != ambient {
                return Err(Error::Linalg(format!(
                    "member {i} lives in dimension {}, expected {ambient}",
                    s.ambient()
                )));
            }
        }
        for (i, w) in members.windows(2).enumerate() {
            if w[0].dim() >= w[1].dim() || !w[1].contains_subspace(&w[0]) {
                return Err(Error::Domain(format!(
                    "members {i} and {} do not form a strictly increasing chain",
                    i + 1
                )));
            }
        }
        if let Some(g) = &form {
            if g.dim() != ambient {
                return Err(Error::Linalg("form dimension does not match".into()));
            }
            for s in &members {
                if let Err((x, y)) = g.check_isotropic(s.basis()) {
                    return Err(Error::NotIsotropic { x, y });
                }
            }
        }
        Ok(FiniteFlagPoint {
            ambient,
            members,
            form,
        })
    }

    /// Members spanned by the given row matrices.
    pub fn from_bases(ambient: usize, bases: &[Matrix<F>], form: Option<Form<F>>) -> Result<Self> {
        Self::new(ambient, bases.iter().map(Subspace::span).collect(), form)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn members(&self) -> &[Subspace<F>] {
        &self.members
    }

    pub fn form(&self) -> Option<&Form<F>> {
        self.form.as_ref()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.members.iter().map(|s| s.dim()).collect()
    }

    pub fn with_form(mut self, form: Option<Form<F>>) -> Result<Self> {
        let members = std::mem::take(&mut self.members);
        Self::new(self.ambient, members, form)
    }
}

impl<F: Field> Serialize for FiniteFlagPoint<F> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("FiniteFlagPoint", 3)?;
        st.serialize_field("ambient", &self.ambient)?;
        let bases: Vec<&Matrix<F>> = self.members.iter().map(|m| m.basis()).collect();
        st.serialize_field("members", &bases)?;
        st.serialize_field("form", &self.form)?;
        st.end()
    }
}
