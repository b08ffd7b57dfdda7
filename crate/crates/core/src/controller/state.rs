use std::fmt;

use crate::channel::PolarizationVariant;
use crate::dps::StateCode;
use crate::{Error, Result};

/// DPS code of every element, optionally with a per-element polarization
/// variant.
///
/// The digest form writes each row as `⌈N_bit/4⌉` lowercase hex digits in
/// element order, followed by `-` and one digit per row (`0`, `1`, `2` for
/// 0°, 45°, 90°) when variants are present. `"05a0"` is four 4-bit rows.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StateMatrix {
    codes: Vec<StateCode>,
    variants: Option<Vec<PolarizationVariant>>,
}

impl StateMatrix {
    pub fn new(codes: Vec<StateCode>) -> Result<Self> {
        if let Some(first) = codes.first() {
            if codes.iter().any(|c| c.width() != first.width()) {
                return Err(Error::DimensionMismatch("state rows have different widths".into()));
            }
        }
        Ok(Self { codes, variants: None })
    }

    /// All-zero matrix, the reference state.
    pub fn zeros(rows: usize, width: u8) -> Self {
        Self {
            codes: vec![StateCode::zero(width); rows],
            variants: None,
        }
    }

    pub fn with_variants(mut self, variants: Vec<PolarizationVariant>) -> Result<Self> {
        if variants.len() != self.codes.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} variants for {} rows",
                variants.len(),
                self.codes.len()
            )));
        }
        self.variants = Some(variants);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    /// Row width, `None` for an empty matrix.
    pub fn width(&self) -> Option<u8> {
        self.codes.first().map(|c| c.width())
    }

    pub fn code(&self, n: usize) -> StateCode {
        self.codes[n]
    }

    pub fn codes(&self) -> &[StateCode] {
        &self.codes
    }

    /// # Panics
    ///
    /// When the width differs from the other rows.
    pub fn set_code(&mut self, n: usize, code: StateCode) {
        assert_eq!(code.width(), self.codes[n].width(), "row width mismatch");
        self.codes[n] = code;
    }

    pub fn variant(&self, n: usize) -> Option<PolarizationVariant> {
        self.variants.as_ref().map(|v| v[n])
    }

    pub fn variants(&self) -> Option<&[PolarizationVariant]> {
        self.variants.as_deref()
    }

    /// Sets a row's variant; rows without one before become 0°.
    pub fn set_variant(&mut self, n: usize, v: PolarizationVariant) {
        let len = self.codes.len();
        self.variants.get_or_insert_with(|| vec![PolarizationVariant::Deg0; len])[n] = v;
    }

    pub fn digest(&self) -> String {
        self.to_string()
    }

    /// Inverse of [`Self::digest`] for rows of `width` bits.
    pub fn parse_digest(text: &str, width: u8) -> Result<Self> {
        let bad = |m: &str| Error::InvalidArgument(format!("state digest `{text}`: {m}"));
        if width == 0 || width > StateCode::MAX_WIDTH {
            return Err(bad("unsupported width"));
        }
        let text = text.trim();
        let (codes_part, variant_part) = match text.split_once('-') {
            Some((c, v)) => (c, Some(v)),
            None => (text, None),
        };
        let digits = width.div_ceil(4) as usize;
        if codes_part.len() % digits != 0 || !codes_part.is_ascii() {
            return Err(bad("length is not a multiple of the row size"));
        }
        let mut codes = Vec::with_capacity(codes_part.len() / digits);
        for k in (0..codes_part.len()).step_by(digits) {
            let value = u32::from_str_radix(&codes_part[k..k + digits], 16).map_err(|_| bad("not hexadecimal"))?;
            codes.push(StateCode::from_value(value, width).map_err(|_| bad("row exceeds the width"))?);
        }
        let mut m = Self::new(codes)?;
        if let Some(v) = variant_part {
            let variants = v
                .chars()
                .map(|ch| {
                    ch.to_digit(10)
                        .and_then(|d| PolarizationVariant::from_index(d as usize))
                        .ok_or_else(|| bad("unknown variant digit"))
                })
                .collect::<Result<Vec<_>>>()?;
            m = m.with_variants(variants)?;
        }
        Ok(m)
    }
}

impl fmt::Display for StateMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.codes {
            let digits = c.width().div_ceil(4) as usize;
            write!(f, "{:0digits$x}", c.value())?;
        }
        if let Some(v) = &self.variants {
            f.write_str("-")?;
            for x in v {
                write!(f, "{}", x.index())?;
            }
        }
        Ok(())
    }
}
