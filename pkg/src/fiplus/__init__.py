"""An interpreter and type checker for a polymorphic calculus with disjoint intersection types and merges."""
