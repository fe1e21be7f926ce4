//! Hardware cost of the ray array and the phase-shifter baseline.
//!
//! Only switches, phase shifters and antenna elements are priced; RF chains
//! are common to both architectures and combiners are left out.

use std::fmt::Write as _;

use crate::error::{RaaError, Result};

/// Unit prices. Defaults are Qorvo quotations for a sub-6 GHz front end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceList {
    pub switch: f64,
    pub antenna: f64,
    pub phase_shifter: f64,
}

impl Default for PriceList {
    fn default() -> Self {
        Self {
            switch: 0.12,
            antenna: 0.01,
            phase_shifter: 63.44,
        }
    }
}

impl PriceList {
    pub fn validate(&self) -> Result<()> {
        let all = [self.switch, self.antenna, self.phase_shifter];
        if all.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(RaaError::InvalidArgument(format!(
                "prices must be non-negative and finite, got {self:?}"
            )));
        }
        Ok(())
    }
}

fn check_counts(counts: &[(&str, usize)]) -> Result<()> {
    match counts.iter().find(|(_, v)| *v == 0) {
        Some((name, _)) => Err(RaaError::InvalidArgument(format!(
            "{name} must be positive"
        ))),
        None => Ok(()),
    }
}

/// `N_RF·N·p_sw + N·M·p_ant`: a switch from every ray to every chain.
pub fn cost_raa(
    n_rf: usize,
    rays: usize,
    elements_per_ray: usize,
    prices: &PriceList,
) -> Result<f64> {
    check_counts(&[("N_RF", n_rf), ("N", rays), ("M", elements_per_ray)])?;
    prices.validate()?;
    Ok(n_rf as f64 * rays as f64 * prices.switch
        + rays as f64 * elements_per_ray as f64 * prices.antenna)
}

/// `N_RF·M·p_ps + M·p_ant` for a fully connected phase-shifter network.
pub fn cost_hbf(n_rf: usize, elements: usize, prices: &PriceList) -> Result<f64> {
    check_counts(&[("N_RF", n_rf), ("M", elements)])?;
    prices.validate()?;
    Ok(n_rf as f64 * elements as f64 * prices.phase_shifter + elements as f64 * prices.antenna)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostReport {
    pub n_rf: usize,
    pub rays: usize,
    pub elements: usize,
    pub raa: f64,
    pub hbf: f64,
}

impl CostReport {
    pub fn new(n_rf: usize, rays: usize, elements: usize, prices: &PriceList) -> Result<Self> {
        Ok(Self {
            n_rf,
            rays,
            elements,
            raa: cost_raa(n_rf, rays, elements, prices)?,
            hbf: cost_hbf(n_rf, elements, prices)?,
        })
    }

    /// `cost_raa / cost_hbf`, or `None` when the baseline costs nothing.
    pub fn ratio(&self) -> Option<f64> {
        (self.hbf > 0.0).then(|| self.raa / self.hbf)
    }

    /// `architecture,N_RF,N,M,cost,ratio_to_hbf`. Costs print with two decimals,
    /// ratios with four; an undefined ratio prints as `undefined`. The baseline
    /// row lists its codeword count `M` under `N`.
    pub fn to_csv(&self) -> String {
        let ratio =
            |v: Option<f64>| v.map_or_else(|| "undefined".to_string(), |r| format!("{r:.4}"));
        let hbf_ratio = (self.hbf > 0.0).then_some(1.0);
        let mut out = String::from("architecture,N_RF,N,M,cost,ratio_to_hbf\n");
        let _ = writeln!(
            out,
            "raa,{},{},{},{:.2},{}",
            self.n_rf,
            self.rays,
            self.elements,
            self.raa,
            ratio(self.ratio())
        );
        let _ = writeln!(
            out,
            "hbf,{},{},{},{:.2},{}",
            self.n_rf,
            self.elements,
            self.elements,
            self.hbf,
            ratio(hbf_ratio)
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::design_orientations;
    use std::f64::consts::PI;

    #[test]
    fn quoted_single_chain_costs() {
        let p = PriceList::default();
        assert_eq!(format!("{:.2}", cost_raa(1, 25, 16, &p).unwrap()), "7.00");
        assert_eq!(format!("{:.2}", cost_hbf(1, 16, &p).unwrap()), "1015.20");
        let r = CostReport::new(1, 25, 16, &p).unwrap();
        assert_eq!(format!("{:.4}", r.ratio().unwrap()), "0.0069");
    }

    #[test]
    fn two_chains() {
        let p = PriceList::default();
        assert!((cost_raa(2, 25, 16, &p).unwrap() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn zero_counts_are_rejected() {
        let p = PriceList::default();
        assert!(matches!(
            cost_raa(0, 25, 16, &p),
            Err(RaaError::InvalidArgument(_))
        ));
        assert!(cost_hbf(1, 0, &p).is_err());
        let bad = PriceList { switch: -1.0, ..p };
        assert!(cost_raa(1, 25, 16, &bad).is_err());
    }

    #[test]
    fn free_parts_cost_nothing() {
        let p = PriceList {
            switch: 0.0,
            antenna: 0.0,
            phase_shifter: 0.0,
        };
        let r = CostReport::new(3, 25, 16, &p).unwrap();
        assert_eq!(r.hbf, 0.0);
        assert_eq!(r.ratio(), None);
        assert!(r.to_csv().contains("raa,3,25,16,0.00,undefined"));
    }

    #[test]
    fn costs_scale_linearly_with_prices() {
        let p = PriceList::default();
        let q = PriceList {
            switch: 2.0 * p.switch,
            antenna: 2.0 * p.antenna,
            phase_shifter: 2.0 * p.phase_shifter,
        };
        assert_eq!(
            2.0 * cost_raa(3, 25, 16, &p).unwrap(),
            cost_raa(3, 25, 16, &q).unwrap()
        );
        assert_eq!(
            2.0 * cost_hbf(3, 16, &p).unwrap(),
            cost_hbf(3, 16, &q).unwrap()
        );
    }

    #[test]
    fn ray_array_is_cheaper_across_sizes() {
        let p = PriceList::default();
        for m in 4..=64 {
            let (n, _) = design_orientations(m, 0.5 * PI).unwrap();
            for n_rf in 1..=8 {
                assert!(cost_raa(n_rf, n, m, &p).unwrap() < cost_hbf(n_rf, m, &p).unwrap());
            }
        }
    }

    #[test]
    fn csv_layout() {
        let csv = CostReport::new(1, 25, 16, &PriceList::default())
            .unwrap()
            .to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "architecture,N_RF,N,M,cost,ratio_to_hbf");
        assert_eq!(lines[1], "raa,1,25,16,7.00,0.0069");
        assert_eq!(lines[2], "hbf,1,16,16,1015.20,1.0000");
    }
}
