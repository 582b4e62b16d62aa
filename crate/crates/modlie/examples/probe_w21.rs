use modlie::cartan::witt;
use modlie::cohomology::{restricted_h2, h1, h2};
use modlie::field::PrimeField;
use std::time::Instant;

fn main() {
    let f = PrimeField::new(5).unwrap();
    let w = witt(2, &[1, 1], f).unwrap();
    let rl = w.restricted().unwrap();
    let t0 = Instant::now();
    let rep = restricted_h2(&rl, Some(&w.grading)).unwrap();
    println!("W(2;1) h2* = {} in {:?}", rep.dimension, t0.elapsed());
    for (c, d) in &rep.by_class { println!("  class {:?}: {}", c, d); }
    let t0 = Instant::now();
    let r1 = h1(&w.lie, Some(&w.grading)).unwrap();
    println!("W(2;1) h1 = {} in {:?}", r1.dimension, t0.elapsed());
    let t0 = Instant::now();
    let r2 = h2(&w.lie, Some(&w.grading)).unwrap();
    println!("W(2;1) h2 = {} in {:?}", r2.dimension, t0.elapsed());
}
