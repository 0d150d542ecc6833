"""entrypoint for checkout-service"""
