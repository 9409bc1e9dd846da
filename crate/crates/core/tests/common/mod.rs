#![allow(dead_code)]

pub mod exhaustive;
pub mod qp;
pub mod small;
