use core::fmt;
use core::str::FromStr;

use rust_decimal::Decimal;

/// Unit of weight for face values and quotations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WeightUnit {
    Kilogram,
    Tonne,
}

impl WeightUnit {
    pub const fn symbol(self) -> &'static str {
        match self {
            WeightUnit::Kilogram => "kg",
            WeightUnit::Tonne => "t",
        }
    }

    /// Kilograms per unit.
    pub fn kilograms(self) -> Decimal {
        match self {
            WeightUnit::Kilogram => Decimal::ONE,
            WeightUnit::Tonne => Decimal::ONE_THOUSAND,
        }
    }

    /// Factor converting a weight in `self` into `other`.
    pub fn factor_to(self, other: WeightUnit) -> Decimal {
        self.kilograms() / other.kilograms()
    }
}

impl fmt::Display for WeightUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown weight unit `{0}` (expected kg or t)")]
pub struct UnknownUnit(pub alloc::string::String);

impl FromStr for WeightUnit {
    type Err = UnknownUnit;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "kg" => Ok(WeightUnit::Kilogram),
            "t" | "ton" | "tonne" => Ok(WeightUnit::Tonne),
            other => Err(UnknownUnit(other.into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversion_factors() {
        assert_eq!(WeightUnit::Kilogram.factor_to(WeightUnit::Tonne), Decimal::new(1, 3));
        assert_eq!(WeightUnit::Tonne.factor_to(WeightUnit::Kilogram), Decimal::ONE_THOUSAND);
        assert_eq!(WeightUnit::Tonne.factor_to(WeightUnit::Tonne), Decimal::ONE);
        assert_eq!("ton".parse::<WeightUnit>().unwrap(), WeightUnit::Tonne);
        assert!("lb".parse::<WeightUnit>().is_err());
    }
}
