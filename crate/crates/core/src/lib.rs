pub mod criteria;
pub mod model;
pub mod number;
pub mod operator;
pub mod oracle;
pub mod tensor;
