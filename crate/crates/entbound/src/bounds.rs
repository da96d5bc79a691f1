//! The three entanglement bound formulas for pure-dephasing evolution and a
//! per-instance verifier that evaluates all of them plus the inequality chain
//! connecting them.

use serde::{Deserialize, Serialize};

use crate::dynamics::DephasingModel;
use crate::error::{Error, Result};
use crate::info::{
    coherence_computational, conditional_entropy, dephase_computational, fidelity,
    quantum_mutual_info, von_neumann_entropy, EnvEnsemble, Povm,
};
use crate::linalg::{herm_eig, DensityMatrix};
use crate::povm::{optimize_povm, PovmSearchConfig};
use crate::ree::{ree_lower_bracket, ree_upper_bracket_budget, REE_DIM_CAP};

/// How the environment POVM entering the general lower bound is chosen.
#[derive(Debug, Clone)]
pub enum PovmStrategy {
    /// Caller-supplied POVM.
    Fixed(Povm),
    /// Projective measurement in the eigenbasis of the evolved environment
    /// marginal; cheap heuristic.
    PointerProjective,
    /// Local accessible-information optimizer.
    Optimize(PovmSearchConfig),
}

/// Knobs for `evaluate_instance` beyond the POVM strategy.
#[derive(Debug, Clone)]
pub struct EvalOptions {
    /// Frank-Wolfe refinement rounds for the upper entanglement bracket
    /// (0 = analytic seeds only, still a valid bracket).
    pub ree_fw_iters: usize,
    pub ree_restarts: usize,
    pub seed: u64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            ree_fw_iters: 25,
            ree_restarts: 1,
            seed: 0,
        }
    }
}

/// One named inequality of the verification chain.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub tolerance: f64,
    pub ok: bool,
}

fn check(name: &str, lhs: f64, rhs: f64, tolerance: f64) -> ChainCheck {
    ChainCheck {
        name: name.to_string(),
        lhs,
        rhs,
        tolerance,
        ok: lhs <= rhs + tolerance,
    }
}

/// Every quantity of interest for one (model, state, time) instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReport {
    pub t: f64,
    pub c_r_initial: f64,
    pub c_r_final: f64,
    pub h_i: f64,
    pub h_i_given_m: f64,
    /// Fidelity of the two conditional environment states; qubit systems only.
    pub fidelity_b: Option<f64>,
    pub lower_general: f64,
    pub lower_qubit: Option<f64>,
    pub lower_clamped: f64,
    pub neg_cond_entropy: f64,
    pub mutual_info: f64,
    pub upper: f64,
    pub ree_bracket_low: f64,
    pub ree_bracket_high: f64,
    pub chain_ok: Vec<ChainCheck>,
}

/// Column order of `to_csv_row`.
pub const BOUND_REPORT_CSV_HEADER: &str = "t,C_r_initial,C_r_final,H_I,H_I_given_M,fidelity_B,\
lower_general,lower_qubit,lower_clamped,neg_cond_entropy,mutual_info,upper,\
ree_bracket_low,ree_bracket_high,chain_ok";

fn opt_cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.12e}")).unwrap_or_default()
}

impl BoundReport {
    pub fn all_ok(&self) -> bool {
        self.chain_ok.iter().all(|c| c.ok)
    }

    pub fn to_csv_row(&self) -> String {
        format!(
            "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{},{:.12e},{},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{}",
            self.t,
            self.c_r_initial,
            self.c_r_final,
            self.h_i,
            self.h_i_given_m,
            opt_cell(self.fidelity_b),
            self.lower_general,
            opt_cell(self.lower_qubit),
            self.lower_clamped,
            self.neg_cond_entropy,
            self.mutual_info,
            self.upper,
            self.ree_bracket_low,
            self.ree_bracket_high,
            self.all_ok()
        )
    }
}

/// C_r(ρ_S) − H(I|M): the measurement-dependent lower bound on the
/// system-environment relative entropy of entanglement.
pub fn lower_bound_general(rho_s: &DensityMatrix, e: &EnvEnsemble, m: &Povm) -> Result<f64> {
    if e.len() != rho_s.dim() {
        return Err(Error::DimMismatch(format!(
            "ensemble has {} members for system dimension {}",
            e.len(),
            rho_s.dim()
        )));
    }
    for (i, &p) in e.probs().iter().enumerate() {
        let pop = rho_s.mat()[[i, i]].re;
        if (p - pop).abs() > 1e-10 {
            return Err(Error::BadProbs(format!(
                "ensemble prob {p} differs from population {pop} at index {i}"
            )));
        }
    }
    Ok(coherence_computational(rho_s)? - conditional_entropy(e, m)?)
}

/// Qubit specialization C_r − 2√(p(1−p))·B(ρ_0, ρ_1).
pub fn lower_bound_qubit(
    rho_s: &DensityMatrix,
    rho0: &DensityMatrix,
    rho1: &DensityMatrix,
) -> Result<f64> {
    if rho_s.dim() != 2 {
        return Err(Error::DimMismatch(format!(
            "qubit bound needs d_S = 2, got {}",
            rho_s.dim()
        )));
    }
    let p = rho_s.mat()[[0, 0]].re.clamp(0.0, 1.0);
    let b = fidelity(rho0, rho1)?;
    Ok(coherence_computational(rho_s)? - 2.0 * (p * (1.0 - p)).sqrt() * b)
}

/// C_r(ρ_S) − C_r(σ_S) + H(I), an upper bound on the generated entanglement.
pub fn upper_bound(rho_s: &DensityMatrix, sigma_s: &DensityMatrix) -> Result<f64> {
    if rho_s.dim() != sigma_s.dim() {
        return Err(Error::DimMismatch(format!(
            "upper_bound: {} vs {}",
            rho_s.dim(),
            sigma_s.dim()
        )));
    }
    let h_i = von_neumann_entropy(&dephase_computational(rho_s)?)?;
    Ok(coherence_computational(rho_s)? - coherence_computational(sigma_s)? + h_i)
}

/// max{S(σ_S) − S(σ_SE), S(σ_E) − S(σ_SE)}; negative values allowed.
pub fn neg_cond_entropy_bound(sigma: &DensityMatrix) -> Result<f64> {
    if sigma.dims().len() != 2 {
        return Err(Error::DimMismatch(
            "neg_cond_entropy_bound needs a bipartite state".into(),
        ));
    }
    let s_se = von_neumann_entropy(sigma)?;
    let s_s = von_neumann_entropy(&sigma.partial_trace(0)?)?;
    let s_e = von_neumann_entropy(&sigma.partial_trace(1)?)?;
    Ok((s_s - s_se).max(s_e - s_se))
}

/// Evaluate every bound and the full inequality chain for one instance.
pub fn evaluate_instance(
    model: &DephasingModel,
    rho_s: &DensityMatrix,
    rho_e: &DensityMatrix,
    t: f64,
    strategy: &PovmStrategy,
) -> Result<BoundReport> {
    evaluate_instance_with(model, rho_s, rho_e, t, strategy, &EvalOptions::default())
}

pub fn evaluate_instance_with(
    model: &DephasingModel,
    rho_s: &DensityMatrix,
    rho_e: &DensityMatrix,
    t: f64,
    strategy: &PovmStrategy,
    opts: &EvalOptions,
) -> Result<BoundReport> {
    let sigma = model.evolve(rho_s, rho_e, t)?;
    let sigma_s = sigma.partial_trace(0)?;
    let sigma_e = sigma.partial_trace(1)?;
    let ensemble = model.env_ensemble(rho_s, rho_e, t)?;

    let c_r_initial = coherence_computational(rho_s)?;
    let c_r_final = coherence_computational(&sigma_s)?;
    let h_i = von_neumann_entropy(&dephase_computational(rho_s)?)?;

    let optimized = matches!(strategy, PovmStrategy::Optimize(_));
    let povm = match strategy {
        PovmStrategy::Fixed(m) => m.clone(),
        PovmStrategy::PointerProjective => {
            let dec = herm_eig(sigma_e.mat())?;
            Povm::projective(&dec.eigenvectors)?
        }
        PovmStrategy::Optimize(cfg) => optimize_povm(&ensemble, cfg)?.0,
    };
    let h_i_given_m = conditional_entropy(&ensemble, &povm)?;
    let lower_general = lower_bound_general(rho_s, &ensemble, &povm)?;

    let (fidelity_b, lower_qubit) = if rho_s.dim() == 2 {
        let b = fidelity(&ensemble.states()[0], &ensemble.states()[1])?;
        let lq = lower_bound_qubit(rho_s, &ensemble.states()[0], &ensemble.states()[1])?;
        (Some(b), Some(lq))
    } else {
        (None, None)
    };

    let lower_clamped = lower_general
        .max(lower_qubit.unwrap_or(f64::NEG_INFINITY))
        .max(0.0);
    let neg_cond = neg_cond_entropy_bound(&sigma)?;
    let mutual_info = quantum_mutual_info(&sigma)?;
    let upper = upper_bound(rho_s, &sigma_s)?;

    let (ree_low, ree_high) = if sigma.dim() <= REE_DIM_CAP {
        let low = ree_lower_bracket(&sigma)?;
        let k = (sigma.dim() * sigma.dim()).min(64);
        let (high, _) = ree_upper_bracket_budget(
            &sigma,
            k,
            opts.ree_restarts,
            opts.seed,
            opts.ree_fw_iters,
        )?;
        (low, high)
    } else {
        (ree_lower_bracket(&sigma)?, f64::INFINITY)
    };

    let s_sigma_se = von_neumann_entropy(&sigma)?;
    let s_sigma_s = von_neumann_entropy(&sigma_s)?;
    let s_sigma_e = von_neumann_entropy(&sigma_e)?;

    let mut chain = vec![
        check(
            "lower_general_le_env_neg_cond",
            lower_general,
            s_sigma_e - s_sigma_se,
            1e-9,
        ),
        check("neg_cond_le_mutual_info", neg_cond, mutual_info, 1e-9),
        check("mutual_info_le_upper", mutual_info, upper, 1e-9),
        check("upper_nonnegative", 0.0, upper, 1e-9),
        check("ree_low_le_ree_high", ree_low, ree_high, 1e-4),
        check("lower_general_le_ree_high", lower_general, ree_high, 1e-3),
        check("ree_high_le_mutual_info", ree_high, mutual_info, 1e-3),
    ];
    if let Some(lq) = lower_qubit {
        if optimized {
            chain.push(check("lower_qubit_le_lower_general", lq, lower_general, 1e-6));
        }
    }
    let pure_pure = rho_s.purity() > 1.0 - 1e-10 && rho_e.purity() > 1.0 - 1e-10;
    if pure_pure {
        chain.push(check("pure_lower_le_entropy", lower_general, s_sigma_s, 1e-9));
        if let Some(lq) = lower_qubit {
            chain.push(check("pure_lower_qubit_le_entropy", lq, s_sigma_s, 1e-9));
        }
        chain.push(check("pure_entropy_le_upper", s_sigma_s, upper, 1e-9));
    }
    if rho_s.max_offdiag() < 1e-12 {
        chain.push(check("incoherent_lower_clamped_zero", lower_clamped, 0.0, 0.0));
        chain.push(check("incoherent_ree_high_zero", ree_high, 0.0, 1e-4));
    }

    Ok(BoundReport {
        t,
        c_r_initial,
        c_r_final,
        h_i,
        h_i_given_m,
        fidelity_b,
        lower_general,
        lower_qubit,
        lower_clamped,
        neg_cond_entropy: neg_cond,
        mutual_info,
        upper,
        ree_bracket_low: ree_low,
        ree_bracket_high: ree_high,
        chain_ok: chain,
    })
}
