pub mod campaign;
pub mod embed;
pub mod faults;
pub mod oracle;
pub mod topology;
pub mod validate;

#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/topology.md")]
    pub struct Topology;
    #[doc = include_str!("../../../book/src/faults.md")]
    pub struct Faults;
    #[doc = include_str!("../../../book/src/oracle.md")]
    pub struct Oracle;
    #[doc = include_str!("../../../book/src/embedding.md")]
    pub struct Embedding;
    #[doc = include_str!("../../../book/src/campaigns.md")]
    pub struct Campaigns;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}
