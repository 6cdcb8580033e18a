"""Monte Carlo reproduction of decision error rates."""
