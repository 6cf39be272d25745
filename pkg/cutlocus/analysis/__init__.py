"""Set extraction, ground truths and one-dimensional reductions."""
