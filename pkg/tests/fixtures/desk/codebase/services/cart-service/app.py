"""entrypoint for cart-service"""
