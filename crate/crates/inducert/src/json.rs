//! JSON forms of certificates, kernel handles and exact values.
//!
//! Rationals are `"num/den"` strings, graphs are graph6, and the field
//! names are stable.

use inducert_core::certifier::{Certificate, LinearCertificate, SupportRow, WChoice};
use inducert_core::exactnum::{parse_rational, QuadValue, Rational};
use inducert_core::ffkernel::{F2Form, FpKernelSpec, KernelHandle};
use inducert_core::graphs::{canonical_form, parse_graph6, to_graph6};
use inducert_core::StepKernel;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum JsonError {
    #[error("malformed JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("invalid field {field}: {reason}")]
    Field { field: &'static str, reason: String },
}

fn field(field: &'static str) -> impl Fn(String) -> JsonError {
    move |reason| JsonError::Field { field, reason }
}

/// `"num/den"`, denominators included even when 1.
pub fn rational_str(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rat(s: &str, name: &'static str) -> Result<Rational, JsonError> {
    parse_rational(s).map_err(|e| field(name)(e.to_string()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadJson {
    pub radicands: Vec<u64>,
    pub coords: [String; 4],
}

impl QuadJson {
    pub fn from_value(v: &QuadValue) -> Self {
        QuadJson { radicands: v.radicands(), coords: v.coords().map(|c| rational_str(&c)) }
    }

    pub fn to_value(&self, name: &'static str) -> Result<QuadValue, JsonError> {
        let mut coords: [Rational; 4] = Default::default();
        for (slot, s) in coords.iter_mut().zip(&self.coords) {
            *slot = parse_rat(s, name)?;
        }
        if self.radicands.len() < 2 && coords[2..].iter().any(|c| *c != Rational::default())
            || self.radicands.is_empty() && coords[1] != Rational::default()
        {
            return Err(field(name)("coordinate without a radicand".into()));
        }
        QuadValue::from_parts(&self.radicands, &coords).map_err(|e| field(name)(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum HandleJson {
    Fp { z: u64, p: u64, k: u32, s: u64 },
    F2 { k: usize, q: Vec<u8> },
    Const { alpha: String },
}

impl HandleJson {
    pub fn from_handle(h: &KernelHandle) -> Self {
        match h {
            KernelHandle::Fp(s) => HandleJson::Fp { z: s.z, p: s.p, k: s.k, s: s.s },
            KernelHandle::F2(f) => HandleJson::F2 { k: f.k(), q: f.coefficients() },
            KernelHandle::Const { alpha } => HandleJson::Const { alpha: rational_str(alpha) },
        }
    }

    pub fn to_handle(&self, name: &'static str) -> Result<KernelHandle, JsonError> {
        Ok(match self {
            HandleJson::Fp { z, p, k, s } => {
                KernelHandle::Fp(FpKernelSpec::new(*z, *p, *k, *s).map_err(|e| field(name)(e.to_string()))?)
            }
            HandleJson::F2 { k, q } => {
                KernelHandle::F2(F2Form::from_coefficients(*k, q).map_err(|e| field(name)(e.to_string()))?)
            }
            HandleJson::Const { alpha } => KernelHandle::Const { alpha: parse_rat(alpha, name)? },
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WChoiceJson {
    Const1(String),
    Kernel(HandleJson),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportRowJson {
    #[serde(rename = "H")]
    pub h: String,
    #[serde(rename = "P")]
    pub p: String,
    #[serde(rename = "t_B")]
    pub t_b: String,
    #[serde(rename = "t_U")]
    pub t_u: QuadJson,
    #[serde(rename = "t_W")]
    pub t_w: QuadJson,
    pub contribution: QuadJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    #[serde(rename = "F")]
    pub f: String,
    pub p: String,
    pub delta: String,
    pub lambda: String,
    pub m: usize,
    #[serde(rename = "handle_U")]
    pub handle_u: HandleJson,
    pub k: u32,
    pub z: usize,
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "W_choice")]
    pub w_choice: WChoiceJson,
    pub support: Vec<SupportRowJson>,
    pub gap: QuadJson,
    pub gamma: String,
}

impl CertificateJson {
    pub fn from_certificate(c: &Certificate) -> Self {
        CertificateJson {
            f: to_graph6(&c.f),
            p: rational_str(&c.p),
            delta: rational_str(&c.delta),
            lambda: rational_str(&c.lambda),
            m: c.m,
            handle_u: HandleJson::from_handle(&c.handle_u),
            k: c.k,
            z: c.z,
            n: c.n,
            w_choice: match &c.w {
                WChoice::Const1 => WChoiceJson::Const1("const1".into()),
                WChoice::Kernel(h) => WChoiceJson::Kernel(HandleJson::from_handle(h)),
            },
            support: c
                .support
                .iter()
                .map(|r| SupportRowJson {
                    h: to_graph6(&r.h.to_graph()),
                    p: rational_str(&r.p_value),
                    t_b: rational_str(&r.t_b),
                    t_u: QuadJson::from_value(&r.t_u),
                    t_w: QuadJson::from_value(&r.t_w),
                    contribution: QuadJson::from_value(&r.contribution),
                })
                .collect(),
            gap: QuadJson::from_value(&c.gap),
            gamma: rational_str(&c.gamma),
        }
    }

    pub fn to_certificate(&self) -> Result<Certificate, JsonError> {
        let graph = |s: &str, name: &'static str| parse_graph6(s).map_err(|e| field(name)(e.to_string()));
        let w = match &self.w_choice {
            WChoiceJson::Const1(s) if s == "const1" => WChoice::Const1,
            WChoiceJson::Const1(s) => return Err(field("W_choice")(format!("unknown choice {s:?}"))),
            WChoiceJson::Kernel(h) => WChoice::Kernel(h.to_handle("W_choice")?),
        };
        let mut support = Vec::new();
        for r in &self.support {
            let h = canonical_form(&graph(&r.h, "support.H")?).map_err(|e| field("support.H")(e.to_string()))?;
            support.push(SupportRow {
                h,
                p_value: parse_rat(&r.p, "support.P")?,
                t_b: parse_rat(&r.t_b, "support.t_B")?,
                t_u: r.t_u.to_value("support.t_U")?,
                t_w: r.t_w.to_value("support.t_W")?,
                contribution: r.contribution.to_value("support.contribution")?,
            });
        }
        Ok(Certificate {
            f: graph(&self.f, "F")?,
            p: parse_rat(&self.p, "p")?,
            delta: parse_rat(&self.delta, "delta")?,
            lambda: parse_rat(&self.lambda, "lambda")?,
            m: self.m,
            handle_u: self.handle_u.to_handle("handle_U")?,
            k: self.k,
            z: self.z,
            n: self.n,
            w,
            support,
            gap: self.gap.to_value("gap")?,
            gamma: parse_rat(&self.gamma, "gamma")?,
        })
    }
}

pub fn certificate_to_string(c: &Certificate) -> String {
    serde_json::to_string_pretty(&CertificateJson::from_certificate(c)).expect("plain data serializes")
}

pub fn certificate_from_str(s: &str) -> Result<Certificate, JsonError> {
    serde_json::from_str::<CertificateJson>(s)?.to_certificate()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepKernelJson {
    pub widths: Vec<String>,
    pub values: Vec<Vec<String>>,
}

impl StepKernelJson {
    pub fn from_kernel(k: &StepKernel) -> Self {
        StepKernelJson {
            widths: k.widths().iter().map(rational_str).collect(),
            values: k.values().iter().map(|row| row.iter().map(rational_str).collect()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearCertificateJson {
    #[serde(rename = "F")]
    pub f: String,
    pub p: String,
    pub eps: String,
    pub sigma: i8,
    pub kernel: StepKernelJson,
    pub gap: String,
    /// Coefficients of the gap in the signed step, lowest order first.
    pub eps_poly: Vec<String>,
}

impl LinearCertificateJson {
    pub fn from_certificate(c: &LinearCertificate) -> Self {
        LinearCertificateJson {
            f: to_graph6(&c.f),
            p: rational_str(&c.p),
            eps: rational_str(&c.eps),
            sigma: c.sigma,
            kernel: StepKernelJson::from_kernel(&c.kernel),
            gap: rational_str(&c.gap),
            eps_poly: c.eps_poly.coeffs().iter().map(rational_str).collect(),
        }
    }
}
