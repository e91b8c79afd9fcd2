//! Quantum gate library, circuit-to-system conversion, eventually-periodic
//! schedules, and the complex semi-algebraic regions of the case studies.

pub mod gates;
pub mod region;
pub mod schedule;
pub mod system;

pub use gates::{gate, grover_diffusion, grover_oracle, tensor_power, GateError, UnitaryMode};
pub use region::{sphere_polynomial, Region, RegionError, RegionHint, SphereEncoding};
pub use schedule::{PhaseId, Schedule, ScheduleError};
pub use system::{QSystem, SystemError};
