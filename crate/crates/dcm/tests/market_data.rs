use chrono::{Days, NaiveDate};
use dcm::market_io::{load_series, serialize_series, SeriesMeta};
use dcm_core::market::PriceSeries;
use dcm_core::WeightUnit;
use proptest::prelude::*;
use rust_decimal::Decimal;

fn meta() -> SeriesMeta {
    SeriesMeta { material: "steel".into(), currency: "CNY".into(), unit: WeightUnit::Tonne }
}

/// Strictly increasing dates with positive prices.
fn points() -> impl Strategy<Value = Vec<(NaiveDate, Decimal)>> {
    proptest::collection::vec((1u64..400, 1i64..10_000_000, 0u32..5), 1..60).prop_map(|rows| {
        let mut date = NaiveDate::from_ymd_opt(2000, 1, 1).unwrap();
        rows.into_iter()
            .map(|(gap, mantissa, scale)| {
                date = date.checked_add_days(Days::new(gap)).unwrap();
                (date, Decimal::new(mantissa, scale))
            })
            .collect()
    })
}

fn series(points: Vec<(NaiveDate, Decimal)>) -> PriceSeries {
    let m = meta();
    PriceSeries::new(m.material, m.currency, m.unit, points).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn serialize_then_load_is_identity(points in points()) {
        let s = series(points);
        let text = serialize_series(&s);
        let loaded = load_series(text.as_bytes(), &meta()).unwrap();
        prop_assert_eq!(&loaded, &s);
        prop_assert_eq!(serialize_series(&loaded), text);
    }

    #[test]
    fn later_points_do_not_change_earlier_quotes(points in points(), gap in 1u64..400, price in 1i64..1_000_000, probe in 0usize..60) {
        let s = series(points.clone());
        let (last, _) = *points.last().unwrap();
        let mut extended = points.clone();
        extended.push((last.checked_add_days(Days::new(gap)).unwrap(), Decimal::new(price, 2)));
        let e = series(extended);
        let (date, _) = points[probe % points.len()];
        for d in [date, last] {
            prop_assert_eq!(s.quote_at(d).unwrap(), e.quote_at(d).unwrap());
        }
    }
}
