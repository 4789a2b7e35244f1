#![allow(dead_code)]

pub mod criteria;
pub mod oracle;
pub mod world;

use dismed_core::conditions::Status;

pub fn to_o(s: Status) -> oracle::O {
    match s {
        Status::Satisfied => oracle::O::Sat,
        Status::Violated => oracle::O::Vio,
        Status::VacuouslySatisfied => oracle::O::Vac,
        Status::Indeterminate => oracle::O::Ind,
        Status::Skipped => panic!("skip mode is not modelled by the oracle"),
    }
}
