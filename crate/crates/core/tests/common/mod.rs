pub mod lp_oracle;
