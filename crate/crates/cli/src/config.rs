//! TOML configuration schema and its mapping onto the core types.

use cavnet_core::{Cscq, NetworkConfig, TernarySetParams};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

fn default_hop() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitSpec {
    pub mu_re: f64,
    #[serde(default)]
    pub mu_im: f64,
    pub nu_re: f64,
    #[serde(default)]
    pub nu_im: f64,
    pub alpha_re: f64,
    #[serde(default)]
    pub alpha_im: f64,
}

impl QubitSpec {
    /// Balanced superposition at alpha = 0.5, the benchmark default.
    pub fn balanced() -> Self {
        QubitSpec {
            mu_re: 1.0,
            mu_im: 0.0,
            nu_re: 1.0,
            nu_im: 0.0,
            alpha_re: 0.5,
            alpha_im: 0.0,
        }
    }

    pub fn to_cscq(&self) -> Cscq {
        Cscq::new(
            Complex64::new(self.mu_re, self.mu_im),
            Complex64::new(self.nu_re, self.nu_im),
            Complex64::new(self.alpha_re, self.alpha_im),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetSpec {
    pub g: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub n_receivers: usize,
    #[serde(default = "default_hop")]
    pub hop: f64,
    pub active_sender: usize,
    #[serde(default)]
    pub frame_offset: f64,
    #[serde(default)]
    pub qubit: Option<QubitSpec>,
    pub sets: Vec<SetSpec>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn network(&self) -> NetworkConfig {
        let sets = self
            .sets
            .iter()
            .map(|s| TernarySetParams { g: s.g, delta: s.delta })
            .collect();
        let mut config = NetworkConfig::new(self.n_receivers, sets, self.active_sender);
        config.hop = self.hop;
        config.frame_offset = self.frame_offset;
        config
    }

    pub fn qubit(&self) -> Cscq {
        self.qubit.clone().unwrap_or_else(QubitSpec::balanced).to_cscq()
    }

    pub fn from_network(network: &NetworkConfig, qubit: &Cscq) -> Self {
        ConfigFile {
            n_receivers: network.n_receivers,
            hop: network.hop,
            active_sender: network.active_sender,
            frame_offset: network.frame_offset,
            qubit: Some(QubitSpec {
                mu_re: qubit.mu.re,
                mu_im: qubit.mu.im,
                nu_re: qubit.nu.re,
                nu_im: qubit.nu.im,
                alpha_re: qubit.alpha.re,
                alpha_im: qubit.alpha.im,
            }),
            sets: network
                .sets
                .iter()
                .map(|s| SetSpec { g: s.g, delta: s.delta })
                .collect(),
        }
    }

    /// Canonical emission; also the input to the config hash, so the
    /// hash is stable across formatting differences in the input file.
    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serialization cannot fail")
    }
}
