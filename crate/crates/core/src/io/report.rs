//! Full merit report: every per-outcome and detector-wide figure of merit
//! of a POVM, with deterministic JSON and Markdown serializations.

use std::collections::BTreeMap;

use crate::classical::{
    self, bandwidth, eigenmodes, posterior_frequency, posterior_time, single_photon_block,
    uncertainty_check, OutcomePosteriors, ResolutionResult, UncertaintyCheck,
};
use crate::error::{Error, Result};
use crate::hilbert::TimeWindow;
use crate::io::jsonfmt::Json;
use crate::povm::{purity, Povm};
use crate::quantum::{
    dark_count_rate, default_tau_scan, efficiency_spectrum, joint_detection,
    mode_restricted_element, number_entropy, number_weights, response_profile_from_curve,
};
use crate::tolerances;

/// Knobs for [`MeritReport::generate`].
#[derive(Debug, Clone)]
pub struct ReportOptions {
    /// Modes to compute photon-number entropies for; `None` means all.
    pub modes: Option<Vec<usize>>,
    /// Entropy target (bits) for the Δω/Δt resolution search.
    pub target_bits: f64,
    /// Time window for the posterior time distributions; `None` derives
    /// one from the mode spectra.
    pub window: Option<TimeWindow>,
    /// Detector-on duration T (seconds) for the dark-count rate.
    pub duration: f64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            modes: None,
            target_bits: 4.0,
            window: None,
            duration: 1.0,
        }
    }
}

/// Photon-number entropies of one outcome for one mode.
#[derive(Debug, Clone)]
pub struct ModeNumberEntropies {
    pub mode: usize,
    /// −Σ Pr(n) log₂ Pr(n); `None` when the outcome has no number support
    /// in this mode.
    pub shannon: Option<f64>,
    /// −log₂ Pur of the mode-restricted element; `None` for zero-trace
    /// restrictions.
    pub collision: Option<f64>,
}

/// All per-outcome figures of merit.
#[derive(Debug, Clone)]
pub struct OutcomeMerits {
    pub label: String,
    pub clicks: u64,
    pub purity: Option<f64>,
    pub effective_dimension: Option<f64>,
    /// Single-photon bandwidth Ω_k^(1).
    pub bandwidth: f64,
    pub shannon_entropy: Option<f64>,
    pub collision_entropy: Option<f64>,
    /// Dark-count probability d_k.
    pub dark_count: f64,
    /// Mass of the posterior time distribution inside the window; the
    /// window-truncation error is 1 minus this.
    pub time_coverage: Option<f64>,
    pub number_entropies: Vec<ModeNumberEntropies>,
}

/// Response-time summary for one efficiency eigenmode.
#[derive(Debug, Clone)]
pub struct ResponseSummary {
    pub mode_index: usize,
    pub efficiency: f64,
    pub tau_10: f64,
    pub tau_90: f64,
    pub theta: f64,
    pub monotone_increasing: bool,
}

#[derive(Debug, Clone)]
pub struct Provenance {
    pub input_sha256: Option<String>,
    pub target_bits: f64,
    pub duration: f64,
    pub window: TimeWindow,
    pub requested_modes: Vec<usize>,
}

/// The complete merit catalogue of one detector.
#[derive(Debug, Clone)]
pub struct MeritReport {
    pub outcomes: Vec<OutcomeMerits>,
    pub total_bandwidth: f64,
    pub efficiency_weights: Vec<f64>,
    pub eta_max: f64,
    pub dark_rate: f64,
    pub resolution: ResolutionResult,
    pub uncertainty: UncertaintyCheck,
    pub responses: Vec<ResponseSummary>,
    /// Σ 1/θ_i; `None` when the basis has no two-photon sector.
    pub detection_rate: Option<f64>,
    pub provenance: Provenance,
}

impl MeritReport {
    /// Computes every figure of merit of `povm`. Per-outcome work runs on
    /// up to POVM_MERIT_THREADS workers; results are merged in outcome
    /// label order, so the report is deterministic.
    pub fn generate(
        povm: &Povm,
        input_sha256: Option<String>,
        options: &ReportOptions,
    ) -> Result<MeritReport> {
        let window = match options.window {
            Some(w) => w,
            None => super::default_time_window(povm.basis())?,
        };
        let requested_modes = options
            .modes
            .clone()
            .unwrap_or_else(|| (0..povm.basis().modes()).collect());
        for &mode in &requested_modes {
            if mode >= povm.basis().modes() {
                return Err(Error::DimensionMismatch {
                    expected: povm.basis().modes(),
                    got: mode,
                    context: "requested mode index".into(),
                });
            }
        }

        let n = povm.elements().len();
        let threads = super::thread_cap().clamp(1, n.max(1));
        let per_outcome = parallel_map(n, threads, |k| {
            outcome_work(povm, k, &requested_modes, window)
        })?;

        let mut outcomes = Vec::with_capacity(n);
        let mut posteriors: Vec<OutcomePosteriors> = Vec::new();
        for (merits, posterior) in per_outcome {
            outcomes.push(merits);
            if let Some(p) = posterior {
                posteriors.push(p);
            }
        }
        let mut order: Vec<usize> = (0..outcomes.len()).collect();
        order.sort_by(|&a, &b| outcomes[a].label.cmp(&outcomes[b].label));
        let outcomes: Vec<OutcomeMerits> = order.into_iter().map(|i| outcomes[i].clone()).collect();
        posteriors.sort_by(|a, b| a.label.cmp(&b.label));

        let total_bandwidth: f64 = posteriors.iter().map(|p| p.bandwidth).sum();
        let spectrum = efficiency_spectrum(povm)?;
        let dark_rate = dark_count_rate(povm, options.duration)?;

        let resolution =
            classical::resolutions_from_posteriors(&posteriors, options.target_bits, window)?;
        let uncertainty = uncertainty_check(
            resolution.h_omega,
            resolution.h_t,
            resolution.delta_omega_bin,
            resolution.delta_t_bin,
        );

        let (responses, detection_rate) = if povm.basis().n_max() >= 2 {
            let mut profiles = Vec::new();
            let mut summaries = Vec::new();
            for (i, (&weight, eigenmode)) in spectrum
                .weights()
                .iter()
                .zip(spectrum.eigenmodes())
                .enumerate()
            {
                if weight < 1e-6 {
                    continue;
                }
                let sigma = eigenmode
                    .spectral_std()
                    .max(eigenmode.grid().spacing() / 12.0_f64.sqrt());
                let scan = default_tau_scan(1.0 / (2.0 * sigma));
                let profile = response_profile_from_curve(i, weight, &scan, |tau| {
                    joint_detection(povm, eigenmode, tau)
                })?;
                summaries.push(ResponseSummary {
                    mode_index: i,
                    efficiency: weight,
                    tau_10: profile.tau_10,
                    tau_90: profile.tau_90,
                    theta: profile.theta,
                    monotone_increasing: profile.monotone_increasing,
                });
                profiles.push(profile);
            }
            let rate = crate::quantum::detection_rate(&profiles);
            (summaries, Some(rate))
        } else {
            (Vec::new(), None)
        };

        Ok(MeritReport {
            outcomes,
            total_bandwidth,
            efficiency_weights: spectrum.weights().to_vec(),
            eta_max: spectrum.eta_max(),
            dark_rate,
            resolution,
            uncertainty,
            responses,
            detection_rate,
            provenance: Provenance {
                input_sha256,
                target_bits: options.target_bits,
                duration: options.duration,
                window,
                requested_modes,
            },
        })
    }

    pub fn to_json(&self) -> String {
        let mut root = Json::object();

        let mut detector = Json::object();
        detector.insert("total_bandwidth".into(), Json::Float(self.total_bandwidth));
        detector.insert(
            "efficiency_spectrum".into(),
            Json::Array(
                self.efficiency_weights
                    .iter()
                    .map(|&w| Json::Float(w))
                    .collect(),
            ),
        );
        detector.insert("eta_max".into(), Json::Float(self.eta_max));
        detector.insert("dark_rate_per_s".into(), Json::Float(self.dark_rate));
        detector.insert("h_omega_bits".into(), Json::Float(self.resolution.h_omega));
        detector.insert("h_t_bits".into(), Json::Float(self.resolution.h_t));
        detector.insert(
            "delta_omega_bin".into(),
            Json::Float(self.resolution.delta_omega_bin),
        );
        detector.insert(
            "delta_t_bin".into(),
            Json::Float(self.resolution.delta_t_bin),
        );
        detector.insert(
            "delta_omega".into(),
            Json::Float(self.resolution.delta_omega),
        );
        detector.insert("delta_t".into(), Json::Float(self.resolution.delta_t));
        detector.insert(
            "resolution_product".into(),
            Json::Float(self.resolution.product),
        );
        let mut unc = Json::object();
        unc.insert("lhs_bits".into(), Json::Float(self.uncertainty.lhs));
        unc.insert("rhs_bits".into(), Json::Float(self.uncertainty.rhs));
        unc.insert("satisfied".into(), Json::Bool(self.uncertainty.satisfied));
        detector.insert("uncertainty_relation".into(), Json::Object(unc));
        detector.insert(
            "detection_rate_per_s".into(),
            match self.detection_rate {
                Some(rate) => Json::Float(rate),
                None => Json::Null,
            },
        );
        detector.insert(
            "responses".into(),
            Json::Array(
                self.responses
                    .iter()
                    .map(|r| {
                        let mut o = Json::object();
                        o.insert("mode_index".into(), Json::UInt(r.mode_index as u64));
                        o.insert("efficiency".into(), Json::Float(r.efficiency));
                        o.insert("tau_10".into(), Json::Float(r.tau_10));
                        o.insert("tau_90".into(), Json::Float(r.tau_90));
                        o.insert("theta".into(), Json::Float(r.theta));
                        o.insert(
                            "monotone_increasing".into(),
                            Json::Bool(r.monotone_increasing),
                        );
                        Json::Object(o)
                    })
                    .collect(),
            ),
        );
        root.insert("detector".into(), Json::Object(detector));

        root.insert(
            "outcomes".into(),
            Json::Array(self.outcomes.iter().map(outcome_json).collect()),
        );

        let mut prov = Json::object();
        prov.insert(
            "input_sha256".into(),
            match &self.provenance.input_sha256 {
                Some(h) => Json::Str(h.clone()),
                None => Json::Null,
            },
        );
        prov.insert(
            "target_bits".into(),
            Json::Float(self.provenance.target_bits),
        );
        prov.insert("duration_s".into(), Json::Float(self.provenance.duration));
        let mut window = Json::object();
        window.insert("t_min".into(), Json::Float(self.provenance.window.t_min()));
        window.insert("t_max".into(), Json::Float(self.provenance.window.t_max()));
        window.insert(
            "num_points".into(),
            Json::UInt(self.provenance.window.len() as u64),
        );
        prov.insert("time_window".into(), Json::Object(window));
        prov.insert(
            "requested_modes".into(),
            Json::Array(
                self.provenance
                    .requested_modes
                    .iter()
                    .map(|&m| Json::UInt(m as u64))
                    .collect(),
            ),
        );
        prov.insert("tolerances".into(), tolerances_json());
        root.insert("provenance".into(), Json::Object(prov));

        Json::Object(root).render()
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        out.push_str("# POVM merit report\n\n");

        out.push_str("## Detector\n\n");
        out.push_str("| quantity | value |\n|---|---|\n");
        push_row(
            &mut out,
            "total single-photon bandwidth Ω¹",
            fmt(self.total_bandwidth),
        );
        push_row(&mut out, "η_max", fmt(self.eta_max));
        push_row(
            &mut out,
            "efficiency spectrum",
            self.efficiency_weights
                .iter()
                .map(|w| fmt(*w))
                .collect::<Vec<_>>()
                .join(", "),
        );
        push_row(&mut out, "dark rate (1/s)", fmt(self.dark_rate));
        push_row(&mut out, "H̄_ω (bits)", fmt(self.resolution.h_omega));
        push_row(&mut out, "H̄_t (bits)", fmt(self.resolution.h_t));
        push_row(&mut out, "δω (rad/s)", fmt(self.resolution.delta_omega_bin));
        push_row(&mut out, "δt (s)", fmt(self.resolution.delta_t_bin));
        push_row(&mut out, "Δω (rad/s)", fmt(self.resolution.delta_omega));
        push_row(&mut out, "Δt (s)", fmt(self.resolution.delta_t));
        push_row(&mut out, "Δω·Δt", fmt(self.resolution.product));
        push_row(
            &mut out,
            "uncertainty relation",
            format!(
                "lhs {} > rhs {} : {}",
                fmt(self.uncertainty.lhs),
                fmt(self.uncertainty.rhs),
                if self.uncertainty.satisfied {
                    "ok"
                } else {
                    "VIOLATED"
                }
            ),
        );
        match self.detection_rate {
            Some(rate) => push_row(&mut out, "detection rate R (1/s)", fmt(rate)),
            None => push_row(&mut out, "detection rate R (1/s)", "n/a (N_max < 2)".into()),
        }

        if !self.responses.is_empty() {
            out.push_str("\n## Response times\n\n");
            out.push_str("| mode | efficiency | τ₁₀ (s) | τ₉₀ (s) | θ (s) | rising |\n|---|---|---|---|---|---|\n");
            for r in &self.responses {
                out.push_str(&format!(
                    "| {} | {} | {} | {} | {} | {} |\n",
                    r.mode_index,
                    fmt(r.efficiency),
                    fmt(r.tau_10),
                    fmt(r.tau_90),
                    fmt(r.theta),
                    r.monotone_increasing
                ));
            }
        }

        out.push_str("\n## Outcomes\n\n");
        out.push_str("| label | clicks | purity | d_eff | Ω¹_k | H (bits) | H₂ (bits) | dark d_k | time coverage |\n");
        out.push_str("|---|---|---|---|---|---|---|---|---|\n");
        for o in &self.outcomes {
            out.push_str(&format!(
                "| {} | {} | {} | {} | {} | {} | {} | {} | {} |\n",
                o.label,
                o.clicks,
                fmt_opt(o.purity),
                fmt_opt(o.effective_dimension),
                fmt(o.bandwidth),
                fmt_opt(o.shannon_entropy),
                fmt_opt(o.collision_entropy),
                fmt(o.dark_count),
                fmt_opt(o.time_coverage),
            ));
        }

        out.push_str("\n## Photon-number entropies\n\n");
        out.push_str("| label | mode | H_n (bits) | H₂_n (bits) |\n|---|---|---|---|\n");
        for o in &self.outcomes {
            for ne in &o.number_entropies {
                out.push_str(&format!(
                    "| {} | {} | {} | {} |\n",
                    o.label,
                    ne.mode,
                    fmt_opt(ne.shannon),
                    fmt_opt(ne.collision),
                ));
            }
        }

        out.push_str("\n## Provenance\n\n");
        out.push_str("| field | value |\n|---|---|\n");
        push_row(
            &mut out,
            "input sha256",
            self.provenance
                .input_sha256
                .clone()
                .unwrap_or_else(|| "n/a".into()),
        );
        push_row(&mut out, "target bits", fmt(self.provenance.target_bits));
        push_row(&mut out, "duration (s)", fmt(self.provenance.duration));
        push_row(
            &mut out,
            "time window",
            format!(
                "[{}, {}] × {}",
                fmt(self.provenance.window.t_min()),
                fmt(self.provenance.window.t_max()),
                self.provenance.window.len()
            ),
        );
        push_row(
            &mut out,
            "number-entropy modes",
            self.provenance
                .requested_modes
                .iter()
                .map(|m| m.to_string())
                .collect::<Vec<_>>()
                .join(", "),
        );
        out
    }
}

fn outcome_json(o: &OutcomeMerits) -> Json {
    let mut obj = Json::object();
    obj.insert("label".into(), Json::Str(o.label.clone()));
    obj.insert("clicks".into(), Json::UInt(o.clicks));
    obj.insert("purity".into(), opt_float(o.purity));
    obj.insert(
        "effective_dimension".into(),
        opt_float(o.effective_dimension),
    );
    obj.insert("bandwidth".into(), Json::Float(o.bandwidth));
    obj.insert("shannon_entropy_bits".into(), opt_float(o.shannon_entropy));
    obj.insert(
        "collision_entropy_bits".into(),
        opt_float(o.collision_entropy),
    );
    obj.insert("dark_count".into(), Json::Float(o.dark_count));
    obj.insert("time_coverage".into(), opt_float(o.time_coverage));
    obj.insert(
        "number_entropies".into(),
        Json::Array(
            o.number_entropies
                .iter()
                .map(|ne| {
                    let mut m = Json::object();
                    m.insert("mode".into(), Json::UInt(ne.mode as u64));
                    m.insert("shannon_bits".into(), opt_float(ne.shannon));
                    m.insert("collision_bits".into(), opt_float(ne.collision));
                    Json::Object(m)
                })
                .collect(),
        ),
    );
    Json::Object(obj)
}

fn opt_float(x: Option<f64>) -> Json {
    match x {
        Some(v) => Json::Float(v),
        None => Json::Null,
    }
}

fn tolerances_json() -> Json {
    let mut t = BTreeMap::new();
    t.insert("hermiticity".into(), Json::Float(tolerances::HERMITICITY));
    t.insert("psd_floor".into(), Json::Float(tolerances::PSD_FLOOR));
    t.insert(
        "eigenvalue_ceiling".into(),
        Json::Float(tolerances::EIGENVALUE_CEILING),
    );
    t.insert("zero_trace".into(), Json::Float(tolerances::ZERO_TRACE));
    t.insert(
        "resolution_bits".into(),
        Json::Float(tolerances::RESOLUTION_BITS),
    );
    t.insert(
        "response_tau_rel".into(),
        Json::Float(tolerances::RESPONSE_TAU_REL),
    );
    Json::Object(t)
}

fn fmt(x: f64) -> String {
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{x:.6e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt).unwrap_or_else(|| "n/a".into())
}

fn push_row(out: &mut String, key: &str, value: String) {
    out.push_str(&format!("| {key} | {value} |\n"));
}

type OutcomeWork = (OutcomeMerits, Option<OutcomePosteriors>);

fn outcome_work(
    povm: &Povm,
    index: usize,
    modes: &[usize],
    window: TimeWindow,
) -> Result<OutcomeWork> {
    let element = &povm.elements()[index];
    let basis = povm.basis();

    let purity_value = purity(element).ok();
    let block = single_photon_block(element, basis)?;
    let omega_k = bandwidth(&block);

    let (shannon, collision) = if omega_k > tolerances::ZERO_TRACE {
        (
            Some(classical::outcome_shannon_entropy(&block)?),
            Some(classical::outcome_collision_entropy(&block)?),
        )
    } else {
        (None, None)
    };

    let posterior = if omega_k > tolerances::ZERO_TRACE {
        let decomp = eigenmodes(&block, basis.mode_basis())?;
        Some(OutcomePosteriors {
            label: element.label().to_string(),
            bandwidth: omega_k,
            frequency: posterior_frequency(&decomp)?,
            time: posterior_time(&decomp, window)?,
        })
    } else {
        None
    };
    let time_coverage = posterior.as_ref().map(|p| p.time.integral());

    let number_entropies = modes
        .iter()
        .map(|&mode| {
            let weights = number_weights(element, basis, mode)?;
            let shannon = if weights.normalizer() > tolerances::ZERO_TRACE {
                Some(number_entropy(&weights)?)
            } else {
                None
            };
            let restricted = mode_restricted_element(element, basis, mode)?;
            let collision = purity(&restricted).ok().map(|p| -p.log2());
            Ok(ModeNumberEntropies {
                mode,
                shannon,
                collision,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok((
        OutcomeMerits {
            label: element.label().to_string(),
            clicks: element.clicks(),
            purity: purity_value,
            effective_dimension: purity_value.map(|p| 1.0 / p),
            bandwidth: omega_k,
            shannon_entropy: shannon,
            collision_entropy: collision,
            dark_count: element.matrix()[(0, 0)].re,
            time_coverage,
            number_entropies,
        },
        posterior,
    ))
}

/// Runs `work(0..n)` on up to `threads` scoped workers and returns the
/// results in index order (the first error in index order wins).
fn parallel_map<T, F>(n: usize, threads: usize, work: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
{
    if n == 0 {
        return Ok(Vec::new());
    }
    let threads = threads.clamp(1, n);
    let mut slots: Vec<Option<Result<T>>> = (0..n).map(|_| None).collect();
    if threads == 1 {
        for (i, slot) in slots.iter_mut().enumerate() {
            *slot = Some(work(i));
        }
    } else {
        let chunk = n.div_ceil(threads);
        std::thread::scope(|scope| {
            for (c, slice) in slots.chunks_mut(chunk).enumerate() {
                let work = &work;
                scope.spawn(move || {
                    for (offset, slot) in slice.iter_mut().enumerate() {
                        *slot = Some(work(c * chunk + offset));
                    }
                });
            }
        });
    }
    slots
        .into_iter()
        .map(|slot| slot.expect("worker filled every slot"))
        .collect()
}
