pub mod elastica;
