use dcm_core::attenuation::{attenuation_coefficient, residual_weight, AttenuationSpec, DecayMode};
use dcm_core::logistics::optimal_order_quantity;
use dcm_core::logistics::{
    price_after_storage, storage_increment, total_logistics_cost, CifQuote, LogisticsParams, StorageTariff,
};
use proptest::prelude::*;

fn theta() -> impl Strategy<Value = AttenuationSpec> {
    (1e-9f64..1e-3).prop_map(|loss| AttenuationSpec::from_daily_loss(loss).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn decay_composes(w in 1e-3f64..1e9, spec in theta(), a in 0u32..20_000, b in 0u32..20_000) {
        let direct = residual_weight(w, &spec, a + b).unwrap();
        let stepped = residual_weight(residual_weight(w, &spec, a).unwrap(), &spec, b).unwrap();
        prop_assert!((direct - stepped).abs() <= 1e-9 * direct);
    }

    #[test]
    fn decay_decreases_in_time(w in 1e-3f64..1e9, spec in theta(), t in 0u32..20_000) {
        let now = residual_weight(w, &spec, t).unwrap();
        let later = residual_weight(w, &spec, t + 1).unwrap();
        prop_assert!(later < now);
    }

    #[test]
    fn decay_increases_in_theta(w in 1e-3f64..1e9, loss in 1e-6f64..1e-3, t in 1u32..20_000) {
        let lower = AttenuationSpec::from_daily_loss(loss).unwrap();
        let higher = AttenuationSpec::from_daily_loss(loss * 0.99).unwrap();
        let a = residual_weight(w, &lower, t).unwrap();
        let b = residual_weight(w, &higher, t).unwrap();
        prop_assert!(b > a);
    }

    #[test]
    fn derived_theta_stays_in_open_interval(
        warehouse in 0.0f64..50.0,
        transfer in 0.0f64..50.0,
        rate in 0.0f64..0.99,
        cif in 1.0f64..1e5,
        mode in prop_oneof![
            Just(DecayMode::InterestCredited),
            Just(DecayMode::CostBalanced),
            Just(DecayMode::WarehouseOnly),
        ],
    ) {
        let tariff = StorageTariff { daily_warehouse_charge: warehouse, outbound_transfer_charge: transfer, bank_rate: rate };
        if let Ok(spec) = attenuation_coefficient(&tariff, &CifQuote::price(cif).unwrap(), mode) {
            prop_assert!(spec.theta() > 0.0 && spec.theta() < 1.0);
        }
    }

    #[test]
    fn storage_increment_is_the_price_rise(
        cif in 1.0f64..1e5,
        warehouse in 0.0f64..10.0,
        transfer in 0.0f64..10.0,
        rate in 0.0f64..0.5,
        days in 0.0f64..3650.0,
        include in any::<bool>(),
    ) {
        let cif = CifQuote::price(cif).unwrap();
        let tariff = StorageTariff { daily_warehouse_charge: warehouse, outbound_transfer_charge: transfer, bank_rate: rate };
        let inc = storage_increment(&cif, &tariff, days, include).unwrap();
        let price = price_after_storage(&cif, &tariff, days, include).unwrap();
        prop_assert_eq!(price, cif.price_per_unit + inc);
    }
}

#[test]
fn eoq_never_beaten_by_grid_search() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let params = LogisticsParams {
            ordering_cost: rng.gen_range(1.0..1000.0),
            annual_demand: rng.gen_range(1.0..10_000.0),
            order_quantity: None,
            purchase_price: rng.gen_range(0.1..100.0),
            unit_warehouse_cost: rng.gen_range(0.0..10.0),
            transport_cost: rng.gen_range(0.0..10.0),
            transit_days: rng.gen_range(0.0..60.0),
            bank_rate: rng.gen_range(0.001..0.3),
        };
        let q_star = optimal_order_quantity(&params).unwrap();
        let best = total_logistics_cost(&params, q_star).unwrap();
        // coarse log grid over six decades
        for i in 0..=600 {
            let q = 10f64.powf(-1.0 + i as f64 / 100.0);
            assert!(total_logistics_cost(&params, q).unwrap() >= best * (1.0 - 1e-12));
        }
    }
}
