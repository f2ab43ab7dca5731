use vfront::rcu::{campaign, RcuVariant, CAMPAIGN_FUEL};

fn main() {
    for v in RcuVariant::ALL {
        let runs = if v == RcuVariant::Correct { 20 } else { 10 };
        let start = std::time::Instant::now();
        let summary = campaign(v, runs, 1, CAMPAIGN_FUEL);
        println!(
            "{:<22} stuck {}/{}  inv-fail {}  fuel-exhausted {}  rules {:?}  total {:.1}s",
            v.name(),
            summary.stuck_count(),
            runs,
            summary.invariant_failures(),
            summary.fuel_exhausted(),
            summary.stuck_rules().iter().map(|r| r.as_str()).collect::<std::collections::BTreeSet<_>>(),
            start.elapsed().as_secs_f64()
        );
    }
}
