use vfront::rcu::{campaign, RcuVariant};

fn main() {
    for fuel in [12_000, 30_000, 80_000] {
        let start = std::time::Instant::now();
        let s = campaign(RcuVariant::Correct, 20, 1, fuel);
        let max_wall = s.runs.iter().map(|r| r.wall.as_secs_f64()).fold(0.0, f64::max);
        let terminated: Vec<usize> = s.runs.iter().filter(|r| matches!(r.verdict, vfront::rcu::RcuVerdict::Pass{..})).map(|r| r.index).collect();
        println!(
            "fuel {:>6}: exhausted {}/20 stuck {} max-run {:.1}s total {:.1}s terminated {:?}",
            fuel, s.fuel_exhausted(), s.stuck_count(), max_wall, start.elapsed().as_secs_f64(), terminated
        );
    }
}
