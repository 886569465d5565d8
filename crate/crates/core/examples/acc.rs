use cvi_core::orlicz::NFunction;
use std::time::Instant;

fn main() {
    let t0 = Instant::now();
    let p25 = NFunction::power(2.5).unwrap();
    println!("construct power(2.5): {:?}", t0.elapsed());
    let t0 = Instant::now();
    let v = p25.complementary_value(4.0).unwrap();
    println!("complementary power: {:?} v={v}", t0.elapsed());
    let t0 = Instant::now();
    let h2 = NFunction::hencky(2.0).unwrap();
    println!("construct hencky: {:?}", t0.elapsed());
    let t0 = Instant::now();
    let v = h2.complementary_value(4.0).unwrap();
    println!("complementary hencky: {:?} v={v}", t0.elapsed());
    let t0 = Instant::now();
    let v = h2.phi_inverse(3.0).unwrap();
    println!("phi_inverse hencky: {:?} v={v}", t0.elapsed());
    let t0 = Instant::now();
    let mut acc = 0.0;
    for i in 0..100 { acc += h2.big_phi(0.1 * i as f64).unwrap(); }
    println!("100 big_phi hencky: {:?} acc={acc}", t0.elapsed());
}
