//! Standard, modified and isotropic extensions between finite flag
//! varieties, their Picard pullbacks, composition, and the
//! triangle normalization.
//!
//! Conventions. A strict extension from `Fl(p_1..p_k; V)` to
//! `Fl(q_1..q_ℓ; W)` is given by an injection `α: V → W`, a basis of a
//! complement `K` of `α(V)` whose first `k_dims[i]` rows span `K_i`, and
//! `κ(1..ℓ)` with values in `0..=k+1`. Index `0` stands for the zero space
//! and `k+1` for the whole space, on both sides: `F_0 = 0`, `F_{k+1} = V`,
//! `K_0 = 0` and `K_{ℓ+1} = K`. The flag `F` goes to
//! `(α(F_{κ(i)}) ⊕ K_i)_i`. `K_ℓ` may be smaller than `K`, which makes the
//! class closed under duality.
//!
//! A modified extension stores the strict extension into the dual variety,
//! in coordinates of `W^*` via the standard dot product, and then takes
//! annihilators in reverse order.

use rand::Rng;

use super::FiniteFlagPoint;
use crate::error::{Error, Result};
use crate::flag::FlagDescriptor;
use crate::linalg::{Field, Form, FormKind, Matrix, Subspace};
use crate::sample::{random_injective, random_invertible};

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(bound = "")]
pub struct StandardExtension<F: Field> {
    pub source_ambient: usize,
    pub source_dims: Vec<usize>,
    pub alpha: Matrix<F>,
    pub complement: Matrix<F>,
    pub k_dims: Vec<usize>,
    pub kappa: Vec<usize>,
    pub strict: bool,
    /// Forms on source and target for extensions between isotropic
    /// varieties. Only strict extensions carry forms.
    pub forms: Option<(Form<F>, Form<F>)>,
}

fn prefix<F: Field>(m: &Matrix<F>, k: usize) -> Matrix<F> {
    m.select_rows(&(0..k).collect::<Vec<_>>())
}

impl<F: Field> StandardExtension<F> {
    pub fn field(&self) -> &F {
        self.alpha.field()
    }

    pub fn k(&self) -> usize {
        self.source_dims.len()
    }

    pub fn ell(&self) -> usize {
        self.kappa.len()
    }

    pub fn target_ambient(&self) -> usize {
        self.alpha.cols()
    }

    fn codim(&self) -> usize {
        self.target_ambient() - self.source_ambient
    }

    /// `p_j` with `p_0 = 0` and `p_{k+1} = dim V`.
    fn p(&self, j: usize) -> usize {
        match j {
            0 => 0,
            j if j > self.k() => self.source_ambient,
            j => self.source_dims[j - 1],
        }
    }

    /// `κ` extended by `κ(0) = 0` and `κ(ℓ+1) = k+1`.
    pub fn kappa_ext(&self, i: usize) -> usize {
        match i {
            0 => 0,
            i if i > self.ell() => self.k() + 1,
            i => self.kappa[i - 1],
        }
    }

    /// `dim K_i` with `K_0 = 0` and `K_{ℓ+1} = K`.
    pub fn k_dim_ext(&self, i: usize) -> usize {
        match i {
            0 => 0,
            i if i > self.ell() => self.codim(),
            i => self.k_dims[i - 1],
        }
    }

    /// Target dimensions of the strict part.
    pub fn strict_target_dims(&self) -> Vec<usize> {
        (1..=self.ell())
            .map(|i| self.p(self.kappa_ext(i)) + self.k_dim_ext(i))
            .collect()
    }

    /// Dimensions of the target flags.
    pub fn target_dims(&self) -> Vec<usize> {
        let q = self.strict_target_dims();
        if self.strict {
            q
        } else {
            let n = self.target_ambient();
            q.iter().rev().map(|d| n - d).collect()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let f = self.field();
        let (n, big) = (self.source_ambient, self.target_ambient());
        let bad = |m: String| Err(Error::Domain(m));
        if self.alpha.rows() != n || self.alpha.rank() != n {
            return bad("alpha must be an injective map out of the source space".into());
        }
        if self.complement.rows() != big - n || self.complement.cols() != big {
            return bad(format!("complement must have {} rows of length {big}", big - n));
        }
        if !self.alpha.vstack(&self.complement)?.is_invertible() {
            return bad("the complement does not split the image of alpha".into());
        }
        if self.source_dims.windows(2).any(|w| w[0] >= w[1])
            || self.source_dims.first() == Some(&0)
            || self.source_dims.last().is_some_and(|&d| d >= n)
        {
            return bad("source dimensions must be strictly increasing and proper".into());
        }
        if self.k_dims.len() != self.ell() {
            return bad("one complement dimension per target slot is needed".into());
        }
        for i in 1..=self.ell() + 1 {
            let (k0, k1) = (self.k_dim_ext(i - 1), self.k_dim_ext(i));
            let (c0, c1) = (self.kappa_ext(i - 1), self.kappa_ext(i));
            if k1 < k0 || k1 > self.codim() {
                return bad(format!("complement filtration decreases or overflows at slot {i}"));
            }
            if c1 < c0 || c1 > self.k() + 1 {
                return bad(format!("kappa is not nondecreasing into 0..=k+1 at slot {i}"));
            }
            if k0 == k1 && c0 == c1 {
                return bad(format!("K_{} = K_{i} requires kappa to increase at slot {i}", i - 1));
            }
        }
        for j in 1..=self.k() {
            if !self.kappa.contains(&j) {
                return bad(format!("kappa misses source member {j}"));
            }
        }
        if let Some((gv, gw)) = &self.forms {
            if !self.strict {
                return bad("modified extensions are defined without forms".into());
            }
            if gv.dim() != n || gw.dim() != big || gv.kind != gw.kind {
                return bad("forms do not match the spaces".into());
            }
            let pulled = self.alpha.mul(&gw.gram)?.mul(&self.alpha.transpose())?;
            let quad_ok = (0..n).all(|r| gw.quad(self.alpha.row_slice(r)) == gv.quad(&unit(f, n, r)));
            if pulled != gv.gram || !quad_ok {
                return bad("alpha is not compatible with the forms".into());
            }
            let cross = self.alpha.mul(&gw.gram)?.mul(&self.complement.transpose())?;
            if !cross.is_zero() {
                return bad("the complement is not orthogonal to the image of alpha".into());
            }
            if let Err((x, y)) = gw.check_isotropic(&prefix(&self.complement, self.k_dim_ext(self.ell()))) {
                return Err(Error::NotIsotropic { x, y });
            }
        }
        Ok(())
    }

    fn source_member(&self, p: &FiniteFlagPoint<F>, j: usize) -> Subspace<F> {
        match j {
            0 => Subspace::zero(self.field(), self.source_ambient),
            j if j > self.k() => Subspace::whole(self.field(), self.source_ambient),
            j => p.members()[j - 1].clone(),
        }
    }

    fn strict_members(&self, p: &FiniteFlagPoint<F>) -> Result<Vec<Subspace<F>>> {
        (1..=self.ell())
            .map(|i| {
                let img = self.source_member(p, self.kappa_ext(i)).image(&self.alpha)?;
                img.sum(&Subspace::span(&prefix(&self.complement, self.k_dim_ext(i))))
            })
            .collect()
    }

    pub fn apply(&self, p: &FiniteFlagPoint<F>) -> Result<FiniteFlagPoint<F>> {
        if p.ambient() != self.source_ambient || p.dims() != self.source_dims {
            return Err(Error::Domain(format!(
                "point of shape {:?} in dimension {} does not match source {:?} in dimension {}",
                p.dims(),
                p.ambient(),
                self.source_dims,
                self.source_ambient
            )));
        }
        let z = self.strict_members(p)?;
        let members = if self.strict {
            z
        } else {
            z.iter().rev().map(Subspace::annihilator).collect()
        };
        let form = self.forms.as_ref().map(|(_, gw)| gw.clone());
        FiniteFlagPoint::new(self.target_ambient(), members, form)
    }

    /// The strict extension between the dual varieties inducing the same
    /// map on annihilator chains.
    pub fn dual_strict(&self) -> Result<StandardExtension<F>> {
        if !self.strict {
            return Err(Error::Domain("dual_strict needs a strict extension".into()));
        }
        let (n, big) = (self.source_ambient, self.target_ambient());
        let h = self.alpha.vstack(&self.complement)?.inverse()?.transpose();
        let alpha = prefix(&h, n);
        let complement = h.select_rows(&(n..big).rev().collect::<Vec<_>>());
        let l = self.ell();
        let k = self.k();
        Ok(StandardExtension {
            source_ambient: n,
            source_dims: self.source_dims.iter().rev().map(|d| n - d).collect(),
            alpha,
            complement,
            k_dims: (1..=l).map(|i| self.codim() - self.k_dim_ext(l + 1 - i)).collect(),
            kappa: (1..=l).map(|i| k + 1 - self.kappa_ext(l + 1 - i)).collect(),
            strict: true,
            forms: None,
        })
    }

    /// The strict extension `F ↦ F` on `Fl(dims; F^n)`.
    pub fn identity(f: &F, n: usize, dims: &[usize]) -> Self {
        let k = dims.len();
        StandardExtension {
            source_ambient: n,
            source_dims: dims.to_vec(),
            alpha: Matrix::identity(f, n),
            complement: Matrix::zeros(f, 0, n),
            k_dims: vec![0; k],
            kappa: (1..=k).collect(),
            strict: true,
            forms: None,
        }
    }
}

fn unit<F: Field>(f: &F, n: usize, r: usize) -> Vec<F::Elem> {
    let mut v = vec![f.zero(); n];
    v[r] = f.one();
    v
}

fn compose_strict<F: Field>(psi: &StandardExtension<F>, phi: &StandardExtension<F>) -> Result<StandardExtension<F>> {
    let f = phi.field();
    let gamma = phi.alpha.mul(&psi.alpha)?;
    let big = psi.target_ambient();
    let bk = phi.complement.mul(&psi.alpha)?;
    let mut rows: Vec<Vec<F::Elem>> = Vec::new();
    let mut span = Subspace::zero(f, big);
    let push = |v: Vec<F::Elem>, rows: &mut Vec<Vec<F::Elem>>, span: &mut Subspace<F>| -> Result<()> {
        if !span.contains(&v) {
            *span = span.sum(&Subspace::from_vectors(f, big, std::slice::from_ref(&v))?)?;
            rows.push(v);
        }
        Ok(())
    };
    let mut m_dims = Vec::new();
    for i in 1..=psi.ell() {
        for r in 0..phi.k_dim_ext(psi.kappa_ext(i)) {
            push(bk.row(r), &mut rows, &mut span)?;
        }
        for r in 0..psi.k_dim_ext(i) {
            push(psi.complement.row(r), &mut rows, &mut span)?;
        }
        m_dims.push(rows.len());
    }
    for r in 0..bk.rows() {
        push(bk.row(r), &mut rows, &mut span)?;
    }
    for r in 0..psi.complement.rows() {
        push(psi.complement.row(r), &mut rows, &mut span)?;
    }
    let forms = match (&phi.forms, &psi.forms) {
        (Some((gv, _)), Some((_, gu))) => Some((gv.clone(), gu.clone())),
        _ => None,
    };
    let chi = StandardExtension {
        source_ambient: phi.source_ambient,
        source_dims: phi.source_dims.clone(),
        alpha: gamma,
        complement: Matrix::from_rows(f, big, rows)?,
        k_dims: m_dims,
        kappa: (1..=psi.ell()).map(|i| phi.kappa_ext(psi.kappa_ext(i))).collect(),
        strict: true,
        forms,
    };
    chi.validate()?;
    Ok(chi)
}

/// `ψ ∘ φ` (apply `φ` first). Strict when both are strict or both are
/// modified, modified otherwise.
pub fn compose_standard_extensions<F: Field>(
    psi: &StandardExtension<F>,
    phi: &StandardExtension<F>,
) -> Result<StandardExtension<F>> {
    if psi.source_ambient != phi.target_ambient() || psi.source_dims != phi.target_dims() {
        return Err(Error::Domain(format!(
            "cannot compose: target {:?} in dimension {} against source {:?} in dimension {}",
            phi.target_dims(),
            phi.target_ambient(),
            psi.source_dims,
            psi.source_ambient
        )));
    }
    match (psi.strict, phi.strict) {
        (true, true) => compose_strict(psi, phi),
        (true, false) => {
            let mut chi = compose_strict(&psi.dual_strict()?, phi)?;
            chi.strict = false;
            Ok(chi)
        }
        (false, true) => {
            let mut chi = compose_strict(psi, phi)?;
            chi.strict = false;
            Ok(chi)
        }
        (false, false) => {
            let mut inner = psi.clone();
            inner.strict = true;
            compose_strict(&inner.dual_strict()?, phi)
        }
    }
}

/// Matrix of the pullback on Picard groups in the preferred generators:
/// `matrix[r][c]` is the coefficient of source generator `r + 1` in the
/// pullback of target generator `c + 1`.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct PicPullback {
    pub matrix: Vec<Vec<u64>>,
}

impl PicPullback {
    pub fn rows(&self) -> usize {
        self.matrix.len()
    }

    /// `self` then `other`: the pullback along `ψ ∘ φ` is
    /// `pic(φ).then(pic(ψ))`.
    pub fn then(&self, other: &PicPullback) -> PicPullback {
        let cols = other.matrix.first().map_or(0, |r| r.len());
        let matrix = self
            .matrix
            .iter()
            .map(|row| {
                (0..cols)
                    .map(|c| row.iter().zip(&other.matrix).map(|(a, o)| a * o[c]).sum())
                    .collect()
            })
            .collect();
        PicPullback { matrix }
    }
}

pub fn pic_pullback<F: Field>(d: &StandardExtension<F>) -> PicPullback {
    let (k, l) = (d.k(), d.ell());
    let mut matrix = vec![vec![0u64; l]; k];
    for c in 0..l {
        let slot = if d.strict { c + 1 } else { l - c };
        let j = d.kappa_ext(slot);
        if (1..=k).contains(&j) {
            matrix[j - 1][c] = 1;
        }
    }
    PicPullback { matrix }
}

/// Every column pulls back to zero or to a single preferred generator.
pub fn is_linear(m: &PicPullback) -> bool {
    let cols = m.matrix.first().map_or(0, |r| r.len());
    (0..cols).all(|c| {
        let col: Vec<u64> = m.matrix.iter().map(|r| r[c]).collect();
        col.iter().all(|&x| x <= 1) && col.iter().filter(|&&x| x == 1).count() <= 1
    })
}

/// A line bundle `⊗ L_i^{n_i}` on a variety with `k` preferred generators is
/// ample iff every `n_i` is positive.
pub fn is_ample(coeffs: &[i64], k: usize) -> bool {
    coeffs.len() == k && coeffs.iter().all(|&c| c > 0)
}

/// Views a flag of `V` inside the isotropic variety of `W` through an
/// embedding whose image is isotropic.
pub fn isotropic_extension<F: Field>(
    p: &FiniteFlagPoint<F>,
    ambient_form: &Form<F>,
    embedding: &Matrix<F>,
) -> Result<FiniteFlagPoint<F>> {
    if embedding.rows() != p.ambient() || embedding.cols() != ambient_form.dim() {
        return Err(Error::Domain("embedding shape does not match".into()));
    }
    if embedding.rank() != embedding.rows() {
        return Err(Error::Domain("embedding is not injective".into()));
    }
    if let Err((x, y)) = ambient_form.check_isotropic(embedding) {
        return Err(Error::NotIsotropic { x, y });
    }
    let members = p
        .members()
        .iter()
        .map(|s| s.image(embedding))
        .collect::<Result<Vec<_>>>()?;
    FiniteFlagPoint::new(ambient_form.dim(), members, Some(ambient_form.clone()))
}

/// Strict extension carrying the width-`n` truncation of `d` into the
/// width-`n+1` truncation, block by block at equal positions. General
/// blocks are embedded at their left end; isotropic blocks on the left
/// half, mirrored on the right half, and the middle gap centered, so the
/// standard forms are respected.
pub fn exhaustion_step<F: Field>(f: &F, d: &FlagDescriptor, n: u64) -> Result<StandardExtension<F>> {
    let chain = d.sampled_chain();
    let small = chain.truncate(n)?;
    let large = chain.truncate(n + 1)?;
    let emb = chain.truncation_embedding(n)?;
    let (vs, _) = d.sample(n)?;
    let (vl, _) = d.sample(n + 1)?;
    let (ns, nl) = (vs.ambient as usize, vl.ambient as usize);
    let starts = |b: &[u64]| -> Vec<usize> {
        let mut acc = 0;
        b.iter()
            .map(|&x| {
                let s = acc;
                acc += x as usize;
                s
            })
            .collect()
    };
    let (ss, sl) = (starts(&small.blocks), starts(&large.blocks));
    let mut alpha = Matrix::zeros(f, ns, nl);
    let mut hit = vec![false; nl];
    let mut map = |a: usize, b: usize, alpha: &mut Matrix<F>| {
        alpha.set(a, b, f.one());
        hit[b] = true;
    };
    for (j, &t) in emb.iter().enumerate() {
        for o in 0..small.blocks[j] as usize {
            map(ss[j] + o, sl[t] + o, &mut alpha);
            if d.is_isotropic() {
                map(ns - 1 - (ss[j] + o), nl - 1 - (sl[t] + o), &mut alpha);
            }
        }
    }
    let half_s: usize = small.blocks.iter().sum::<u64>() as usize;
    let half_l: usize = large.blocks.iter().sum::<u64>() as usize;
    if d.is_isotropic() {
        let (ms, ml) = (ns - 2 * half_s, nl - 2 * half_l);
        let shift = (ml - ms) / 2;
        for o in 0..ms {
            map(half_s + o, half_l + shift + o, &mut alpha);
        }
    }
    let block_of = |c: usize| sl.iter().rposition(|&s| s <= c).unwrap();
    // New coordinates: left half (or the whole space) by target block,
    // then for isotropic chains the middle and the mirrored half.
    let left_end = if d.is_isotropic() { half_l } else { nl };
    let mut new_left: Vec<usize> = (0..left_end).filter(|&c| !hit[c]).collect();
    new_left.sort_by_key(|&c| (block_of(c), c));
    let rest: Vec<usize> = (left_end..nl).filter(|&c| !hit[c]).collect();
    let order: Vec<usize> = new_left.iter().chain(&rest).copied().collect();
    let complement = Matrix::unit_rows(f, nl, &order);
    let target_blocks = large.blocks.len();
    let ell = if d.is_isotropic() { target_blocks } else { target_blocks - 1 };
    let k_dims = (1..=ell)
        .map(|i| new_left.iter().filter(|&&c| block_of(c) < i).count())
        .collect();
    let kappa = (1..=ell).map(|i| emb.iter().filter(|&&t| t < i).count()).collect();
    let forms = match d.form() {
        crate::flag::FormType::General => None,
        crate::flag::FormType::Orthogonal => Some((
            Form::standard(f, FormKind::Orthogonal, ns)?,
            Form::standard(f, FormKind::Orthogonal, nl)?,
        )),
        crate::flag::FormType::Symplectic => Some((
            Form::standard(f, FormKind::Symplectic, ns)?,
            Form::standard(f, FormKind::Symplectic, nl)?,
        )),
    };
    let ext = StandardExtension {
        source_ambient: ns,
        source_dims: vs.dims.iter().map(|&x| x as usize).collect(),
        alpha,
        complement,
        k_dims,
        kappa,
        strict: true,
        forms,
    };
    ext.validate()?;
    let expected: Vec<usize> = vl.dims.iter().map(|&x| x as usize).collect();
    if ext.target_dims() != expected {
        return Err(Error::Domain(format!(
            "exhaustion step lands in {:?}, expected {:?}",
            ext.target_dims(),
            expected
        )));
    }
    Ok(ext)
}

/// A random flag of the given shape.
pub fn random_point<F: Field, R: Rng>(f: &F, n: usize, dims: &[usize], rng: &mut R) -> FiniteFlagPoint<F> {
    let b = random_invertible(f, n, rng);
    let bases: Vec<Matrix<F>> = dims.iter().map(|&d| prefix(&b, d)).collect();
    FiniteFlagPoint::from_bases(n, &bases, None).expect("increasing chain")
}

/// A random strict extension out of `Fl(dims; F^n)` whose target has
/// dimension at most `n + max_extra`.
pub fn random_extension<F: Field, R: Rng>(
    f: &F,
    n: usize,
    dims: &[usize],
    max_extra: usize,
    rng: &mut R,
) -> StandardExtension<F> {
    let big = n + rng.gen_range(0..=max_extra);
    let codim = big - n;
    let alpha = random_injective(f, n, big, rng);
    let complement = loop {
        let c = crate::sample::random_matrix(f, codim, big, rng);
        if alpha.vstack(&c).unwrap().is_invertible() {
            break c;
        }
    };
    let k = dims.len();
    // A monotone path from (κ, dim K) = (0, 0) to (k+1, codim) in which
    // every step raises κ by at most one and raises at least one of them.
    let mut events: Vec<bool> = std::iter::repeat_n(true, k + 1)
        .chain(std::iter::repeat_n(false, codim))
        .collect();
    use rand::seq::SliceRandom;
    events.shuffle(rng);
    let mut steps = Vec::new();
    let (mut c, mut kd) = (0, 0);
    let (mut open, mut has_kappa) = (false, false);
    for (idx, &ev) in events.iter().enumerate() {
        if ev && has_kappa {
            steps.push((c, kd));
            has_kappa = false;
        }
        if ev {
            c += 1;
            has_kappa = true;
        } else {
            kd += 1;
        }
        open = true;
        if idx + 1 < events.len() && rng.gen_bool(0.5) {
            steps.push((c, kd));
            open = false;
            has_kappa = false;
        }
    }
    if open {
        steps.push((c, kd));
    }
    // The last step reaches (k+1, codim), the implicit final slot.
    steps.pop();
    let (kappa, k_dims) = steps.into_iter().unzip();
    let ext = StandardExtension {
        source_ambient: n,
        source_dims: dims.to_vec(),
        alpha,
        complement,
        k_dims,
        kappa,
        strict: true,
        forms: None,
    };
    debug_assert!(ext.validate().is_ok());
    ext
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct TriangleReport {
    pub ok: bool,
    pub failures: Vec<String>,
    /// First target slot `i` (1-based) where a check failed.
    pub failing_index: Option<usize>,
    /// Whether `β` had to be replaced to make `γ = β∘α` hold exactly.
    pub adjusted: bool,
    pub scale: Option<String>,
    pub adjusted_beta: Option<Vec<Vec<String>>>,
    /// For information: whether the adjusted `ψ` agrees with the given one
    /// on the sampled points of its whole source.
    pub psi_unchanged: Option<bool>,
}

impl TriangleReport {
    fn fail(&mut self, index: Option<usize>, msg: String) {
        self.ok = false;
        if self.failing_index.is_none() {
            self.failing_index = index;
        }
        self.failures.push(msg);
    }
}

/// Checks that `χ = ψ ∘ φ` is realized by the data: `μ = κ∘λ`,
/// `M_i = L_i ⊕ β(K_{λ(i)})`, and after adjusting `β` on `α(V)` by a map
/// into `M_{i0}` and a scalar, `γ = α·β` exactly. `samples` random points
/// confirm that the adjusted `ψ` still composes to `χ`.
pub fn check_triangle<F: Field, R: Rng>(
    phi: &StandardExtension<F>,
    psi: &StandardExtension<F>,
    chi: &StandardExtension<F>,
    samples: usize,
    rng: &mut R,
) -> TriangleReport {
    let mut rep = TriangleReport {
        ok: true,
        failures: Vec::new(),
        failing_index: None,
        adjusted: false,
        scale: None,
        adjusted_beta: None,
        psi_unchanged: None,
    };
    if !(phi.strict && psi.strict && chi.strict) {
        rep.fail(None, "the triangle check needs strict extensions".into());
        return rep;
    }
    if chi.source_ambient != phi.source_ambient
        || chi.source_dims != phi.source_dims
        || chi.target_ambient() != psi.target_ambient()
        || chi.ell() != psi.ell()
        || psi.source_ambient != phi.target_ambient()
        || psi.source_dims != phi.target_dims()
    {
        rep.fail(None, "shapes of chi and psi∘phi differ".into());
        return rep;
    }
    if phi.k() == 0 {
        rep.fail(None, "the source has no proper members".into());
        return rep;
    }
    for i in 1..=psi.ell() {
        let want = phi.kappa_ext(psi.kappa_ext(i));
        if chi.kappa_ext(i) != want {
            rep.fail(Some(i), format!("mu({i}) = {} but kappa(lambda({i})) = {want}", chi.kappa_ext(i)));
        }
    }
    if !rep.ok {
        return rep;
    }
    let f = phi.field();
    let bk = match phi.complement.mul(&psi.alpha) {
        Ok(m) => m,
        Err(e) => {
            rep.fail(None, e.to_string());
            return rep;
        }
    };
    for i in 1..=psi.ell() {
        let m_i = Subspace::span(&prefix(&chi.complement, chi.k_dim_ext(i)));
        let l_i = Subspace::span(&prefix(&psi.complement, psi.k_dim_ext(i)));
        let bk_i = Subspace::span(&prefix(&bk, phi.k_dim_ext(psi.kappa_ext(i))));
        let sum = l_i.sum(&bk_i).expect("shapes");
        if sum != m_i || l_i.dim() + bk_i.dim() != m_i.dim() {
            let witness = (0..m_i.dim())
                .map(|r| m_i.basis().row(r))
                .find(|v| !sum.contains(v))
                .or_else(|| (0..sum.dim()).map(|r| sum.basis().row(r)).find(|v| !m_i.contains(v)));
            let shown = witness
                .map(|v| v.iter().map(|x| f.render(x)).collect::<Vec<_>>().join(" "))
                .unwrap_or_else(|| "the sum is not direct".into());
            rep.fail(Some(i), format!("M_{i} differs from L_{i} + beta(K_lambda({i})): [{shown}]"));
        }
    }
    if !rep.ok {
        return rep;
    }
    match adjust_beta(phi, psi, chi) {
        Ok((beta, c)) => {
            rep.adjusted = beta != psi.alpha;
            rep.scale = Some(f.render(&c));
            rep.adjusted_beta = Some(beta.render());
            let mut fixed = psi.clone();
            fixed.alpha = beta;
            if let Err(e) = fixed.validate() {
                rep.fail(None, format!("adjusted psi is not a standard extension: {e}"));
                return rep;
            }
            for s in 0..samples {
                let x = random_point(f, phi.source_ambient, &phi.source_dims, rng);
                let lhs = phi.apply(&x).and_then(|y| fixed.apply(&y));
                let rhs = chi.apply(&x);
                if lhs.ok() != rhs.ok() {
                    rep.fail(None, format!("adjusted psi after phi differs from chi at sample {s}"));
                    break;
                }
            }
            let unchanged = (0..samples.max(1)).all(|_| {
                let y = random_point(f, psi.source_ambient, &psi.source_dims, rng);
                psi.apply(&y).ok() == fixed.apply(&y).ok()
            });
            rep.psi_unchanged = Some(unchanged);
        }
        Err(msg) => rep.fail(None, msg),
    }
    rep
}

/// Replaces `β` on `α(V)` by its projection onto `γ(V)` along `M`, which
/// must only remove an `M_{i0}` component, then rescales `β` so that
/// `α·β = γ`. Returns the new `β` and the scalar.
fn adjust_beta<F: Field>(
    phi: &StandardExtension<F>,
    psi: &StandardExtension<F>,
    chi: &StandardExtension<F>,
) -> std::result::Result<(Matrix<F>, F::Elem), String> {
    let f = phi.field();
    let n = phi.source_ambient;
    let err = |e: Error| e.to_string();
    let i0 = (1..=chi.ell())
        .find(|&i| chi.kappa_ext(i) >= 1)
        .ok_or("no target member sees the source")?;
    let m_i0 = Subspace::span(&prefix(&chi.complement, chi.k_dim_ext(i0)));
    let gu = chi.alpha.vstack(&chi.complement).map_err(err)?;
    let gu_inv = gu.inverse().map_err(err)?;
    let ab = phi.alpha.mul(&psi.alpha).map_err(err)?;
    let mut gamma_coords = Vec::new();
    for t in 0..n {
        let y = ab.row(t);
        let c = gu_inv.apply(&y).map_err(err)?;
        let (head, tail) = c.split_at(n);
        let m_part = chi.complement.apply(tail).map_err(err)?;
        if !m_i0.contains(&m_part) {
            return Err(format!(
                "beta(alpha(e_{})) has a component outside M_{i0}",
                t + 1
            ));
        }
        gamma_coords.push(head.to_vec());
    }
    // After removing the M_{i0} part, beta∘alpha must be a multiple of gamma.
    let pin = gamma_coords[0]
        .iter()
        .position(|x| !f.is_zero(x))
        .ok_or("beta(alpha(e_1)) has no gamma component")?;
    if pin != 0 {
        return Err("beta(alpha(V)) is not a multiple of gamma".into());
    }
    let c = gamma_coords[0][0].clone();
    for (t, row) in gamma_coords.iter().enumerate() {
        for (s, x) in row.iter().enumerate() {
            let want = if s == t { c.clone() } else { f.zero() };
            if *x != want {
                return Err("beta(alpha(V)) is not a multiple of gamma".into());
            }
        }
    }
    let c_inv = f.inv(&c).ok_or("zero scale")?;
    // New images of the basis [alpha; K] of W.
    let mut images = chi.alpha.to_rows();
    let bk = phi.complement.mul(&psi.alpha).map_err(err)?.scale(&c_inv);
    images.extend(bk.to_rows());
    let images = Matrix::from_rows(f, psi.target_ambient(), images).map_err(err)?;
    let gw = phi.alpha.vstack(&phi.complement).map_err(err)?;
    let beta = gw.inverse().map_err(err)?.mul(&images).map_err(err)?;
    if phi.alpha.mul(&beta).map_err(err)? != chi.alpha {
        return Err("adjusted beta does not compose to gamma".into());
    }
    Ok((beta, c))
}

/// `β + ε` scaled by `s`, where `ε` vanishes on `K` and maps `α(V)` into
/// `M_{i0}`: a perturbation that leaves `ψ∘φ` unchanged.
pub fn perturb_beta<F: Field, R: Rng>(
    phi: &StandardExtension<F>,
    psi: &StandardExtension<F>,
    chi: &StandardExtension<F>,
    rng: &mut R,
) -> Result<StandardExtension<F>> {
    let f = phi.field();
    let i0 = (1..=chi.ell())
        .find(|&i| chi.kappa_ext(i) >= 1)
        .ok_or_else(|| Error::Domain("no target member sees the source".into()))?;
    let m0 = prefix(&chi.complement, chi.k_dim_ext(i0));
    let n = phi.source_ambient;
    let eps_alpha = crate::sample::random_matrix(f, n, m0.rows(), rng).mul(&m0)?;
    let mut images = phi.alpha.mul(&psi.alpha)?.add(&eps_alpha)?.to_rows();
    images.extend(phi.complement.mul(&psi.alpha)?.to_rows());
    let images = Matrix::from_rows(f, psi.target_ambient(), images)?;
    let gw = phi.alpha.vstack(&phi.complement)?;
    let s = crate::sample::random_nonzero(f, rng);
    let mut out = psi.clone();
    out.alpha = gw.inverse()?.mul(&images)?.scale(&s);
    out.validate()?;
    Ok(out)
}
